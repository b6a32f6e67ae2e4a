"""Synthetic data generators and the Monte Carlo benchmark harness.

Every stochastic routine takes a seed (64-bit unsigned) or an
``np.random.Generator``; replicate r of a seeded run draws from a stream
derived from (seed, r), so results are bit-identical regardless of chunking
or worker count.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DomainError, StepSignal, sample_signal
from .estimators import gamma0_hat, optimal_weight, ordinary_diff
from .mafit import MaModel, acvf_from_ma

__all__ = [
    "Ma1Spec",
    "BenchmarkConfig",
    "BenchRow",
    "BenchResult",
    "replicate_rng",
    "gen_ma1",
    "gen_ma",
    "chakar_signal",
    "park_signal",
    "demo_ma6",
    "run_benchmark",
]

ESTIMATOR_CODES = ("O", "H", "R")


def replicate_rng(seed: int, rep: int) -> np.random.Generator:
    """Independent generator for replicate ``rep`` of a run seeded by ``seed``."""
    return np.random.default_rng(np.random.SeedSequence((int(seed), int(rep))))


def _as_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return replicate_rng(seed, 0)


@dataclass
class Ma1Spec:
    """1-dependent error model eps_i = r0 delta_i + r1 delta_{i-1} with
    r0/r1 chosen so the lag-1 correlation equals gamma1; |gamma1| <= 1/2."""

    gamma1: float
    dist: str = "gaussian"

    def __post_init__(self):
        self.gamma1 = float(self.gamma1)
        if abs(self.gamma1) > 0.5:
            raise DomainError("|gamma1| must be <= 0.5")
        if self.dist not in ("gaussian", "t4"):
            raise DomainError("dist must be 'gaussian' or 't4'")


def _innovations(rng: np.random.Generator, dist: str, size: int,
                 standardized: bool) -> np.ndarray:
    if dist == "gaussian":
        return rng.standard_normal(size)
    draws = rng.standard_t(4, size)
    # raw t4 draws have variance 2
    return draws / np.sqrt(2.0) if standardized else draws


def gen_ma1(spec: Ma1Spec, n: int, seed, standardized: bool = False) -> np.ndarray:
    """Draw the 1-dependent error series of length n.

    For gaussian innovations gamma_0 = 1 and gamma_1 = spec.gamma1 exactly
    (r0^2 + r1^2 = 1, r0 r1 = gamma1).  Raw t4 innovations have variance 2, so
    gamma_0 = 2 while the lag-1 correlation stays spec.gamma1; pass
    ``standardized=True`` to rescale the draws to unit variance.
    """
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    rng = _as_rng(seed)
    g1 = spec.gamma1
    r0 = (np.sqrt(1.0 + 2.0 * g1) + np.sqrt(1.0 - 2.0 * g1)) / 2.0
    r1 = (np.sqrt(1.0 + 2.0 * g1) - np.sqrt(1.0 - 2.0 * g1)) / 2.0
    delta = _innovations(rng, spec.dist, n + 1, standardized)
    return r0 * delta[1:] + r1 * delta[:-1]


def gen_ma(model: MaModel, n: int, seed, dist: str = "gaussian") -> np.ndarray:
    """Draw n samples of the MA(m) process with unit-variance innovations
    scaled by sqrt(sigma2); m extra innovations are drawn before index 1 so
    the process is stationary from the first sample."""
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    if dist not in ("gaussian", "t4"):
        raise DomainError("dist must be 'gaussian' or 't4'")
    rng = _as_rng(seed)
    m = model.m
    delta = _innovations(rng, dist, n + m, standardized=True) * np.sqrt(model.sigma2)
    th = np.concatenate(([1.0], model.theta))
    return np.convolve(delta, th)[m:n + m]


def chakar_signal() -> StepSignal:
    """Seven-segment test signal: two large jumps of size 10 then four unit
    jumps, change fractions (5, 7, 16, 20, 27, 33)/36; J_K = 204."""
    taus = np.array([5.0, 7.0, 16.0, 20.0, 27.0, 33.0]) / 36.0
    levels = np.array([0.0, 10.0, 0.0, 1.0, 0.0, 1.0, 0.0])
    return StepSignal(taus, levels)


def park_signal(n: int) -> np.ndarray:
    """Smooth polynomial bump f(x) = 300 x^3 (1-x)^3 sampled at x_i = i/n."""
    n = int(n)
    if n < 1:
        raise DomainError("n must be >= 1")
    x = np.arange(1, n + 1) / n
    return 300.0 * x ** 3 * (1.0 - x) ** 3


def demo_ma6() -> MaModel:
    """6-dependent Gaussian demo noise for the segmentation experiments:
    geometrically decaying positive correlation, gamma_0 = 1/4.

    The scale keeps the unit jumps of the test signal detectable at the
    sample sizes used in the experiments.
    """
    theta = 0.25 ** np.arange(1, 7)
    sigma2 = 0.25 / (1.0 + float(theta @ theta))
    return MaModel(theta, sigma2)


@dataclass
class BenchmarkConfig:
    """One benchmark cell: sample size, replicate count, dependence order,
    seed, signal, error model, and the estimator codes to evaluate."""

    n: int
    reps: int
    m: int
    seed: int
    signal: object = "chakar"
    error: object = None
    estimators: tuple = ESTIMATOR_CODES
    standardized_t: bool = False

    def __post_init__(self):
        self.n = int(self.n)
        self.reps = int(self.reps)
        self.m = int(self.m)
        self.seed = int(self.seed)
        if self.reps < 1:
            raise DomainError("reps must be >= 1")
        if self.m < 1:
            raise DomainError("benchmark needs m >= 1")
        if self.error is None:
            self.error = Ma1Spec(0.0)
        if not isinstance(self.error, (Ma1Spec, MaModel)):
            raise DomainError("error must be an Ma1Spec or MaModel")
        self.estimators = tuple(self.estimators)
        bad = [c for c in self.estimators if c not in ESTIMATOR_CODES]
        if bad or not self.estimators:
            raise DomainError(f"unknown estimator codes: {bad or self.estimators}")
        if isinstance(self.signal, str) and self.signal not in ("chakar", "park"):
            raise DomainError("signal must be 'chakar', 'park', or a StepSignal")


@dataclass
class BenchRow:
    gamma1: float
    estimator: str
    lag: int
    mse: float
    se: float
    reps: int
    n: int
    seed: int


@dataclass
class BenchResult:
    rows: list = field(default_factory=list)
    failures: int = 0


def _signal_values(cfg: BenchmarkConfig) -> np.ndarray:
    if isinstance(cfg.signal, StepSignal):
        return sample_signal(cfg.signal, cfg.n)
    if cfg.signal == "chakar":
        return sample_signal(chakar_signal(), cfg.n)
    return park_signal(cfg.n)


def _true_rho(cfg: BenchmarkConfig) -> np.ndarray:
    if isinstance(cfg.error, Ma1Spec):
        rho = np.zeros(cfg.m + 1)
        rho[0] = 1.0
        rho[1] = cfg.error.gamma1
        return rho
    acvf = acvf_from_ma(cfg.error)
    rho = np.array([acvf.at(h) for h in range(cfg.m + 1)])
    return rho / rho[0]


def run_benchmark(cfg: BenchmarkConfig) -> BenchResult:
    """Monte Carlo MSE of the autocorrelation estimators.

    Codes: O = optimized weights per lag over the d=1 variance statistic;
    H = d=1 throughout; R = d=0 throughout.  Replicates with a degenerate
    variance estimate are counted in ``failures`` and excluded.
    """
    f = _signal_values(cfg)
    rho_true = _true_rho(cfg)
    lags = tuple(range(1, min(cfg.m, 2) + 1))
    weights = {h: optimal_weight(cfg.m, h) for h in lags}
    errs = {(code, h): [] for code in cfg.estimators for h in lags}
    failures = 0
    for r in range(cfg.reps):
        rng = replicate_rng(cfg.seed, r)
        if isinstance(cfg.error, Ma1Spec):
            noise = gen_ma1(cfg.error, cfg.n, rng, standardized=cfg.standardized_t)
        else:
            noise = gen_ma(cfg.error, cfg.n, rng)
        y = f + noise
        try:
            g0 = {}
            for dval in {1.0, 0.0} | set(weights.values()):
                g0[dval] = gamma0_hat(y, cfg.m, dval)
            if g0[1.0] <= 0.0 or g0[0.0] <= 0.0:
                raise DomainError("degenerate variance estimate")
            dh = {h: ordinary_diff(y, h) for h in lags}
            for h in lags:
                est = {
                    "O": (g0[weights[h]] - dh[h]) / g0[1.0],
                    "H": (g0[1.0] - dh[h]) / g0[1.0],
                    "R": (g0[0.0] - dh[h]) / g0[0.0],
                }
                for code in cfg.estimators:
                    errs[(code, h)].append(est[code] - rho_true[h])
        except DomainError:
            failures += 1
            continue
    gamma1 = cfg.error.gamma1 if isinstance(cfg.error, Ma1Spec) else float("nan")
    rows = []
    for code in cfg.estimators:
        for h in lags:
            e2 = np.asarray(errs[(code, h)]) ** 2
            if e2.size == 0:
                raise DomainError("all replicates failed")
            rows.append(BenchRow(gamma1, code, h, float(np.mean(e2)),
                                 float(np.std(e2) / np.sqrt(e2.size)),
                                 e2.size, cfg.n, cfg.seed))
    return BenchResult(rows, failures)
