"""dbacv: difference-based autocovariance estimation for piecewise-constant
signals with m-dependent noise, PSD banded-Toeplitz covariance repair, MA
fitting, and dependence-aware multiscale jump segmentation."""

from .core import (
    Acvf,
    ConvergenceError,
    DomainError,
    StepSignal,
    change_indices,
    quadratic_variation,
    sample_signal,
    separation_ok,
)
from .estimators import (
    AcvfEstimate,
    acf_from_estimate,
    dbacf,
    gamma0_hat,
    gammah_hat,
    optimal_weight,
    ordinary_diff,
)
from .analytic import (
    Mse0Breakdown,
    bias_gamma0,
    bias_gammah,
    extended_bias_gamma0,
    f_h,
    lambda_r,
    mse_gamma0,
    p1,
    p2,
    p3,
    q0,
    signal_factor_T,
    v_h,
)
from .projection import (
    BandedToeplitz,
    ProjectionReport,
    covariance_matrix_estimate,
    near_psd_toeplitz,
    project_psd,
    project_toeplitz_banded,
)
from .mafit import MaModel, acvf_from_ma, ma_from_acvf, spectral_density_min, validate_acvf
from .jusd import (
    IntervalSystem,
    StepFit,
    build_intervals,
    local_stat,
    null_quantile,
    partial_sum_variance,
    segment,
)
from .sim import (
    BenchmarkConfig,
    BenchResult,
    BenchRow,
    Ma1Spec,
    chakar_signal,
    demo_ma6,
    gen_ma,
    gen_ma1,
    park_signal,
    replicate_rng,
    run_benchmark,
)

__version__ = "0.1.0"
