"""Closed-form bias and variance components of the second-order difference
estimator, used for weight optimization and for validating the estimators
against Monte Carlo.

The weight argument ``d`` broadcasts: passing an array returns an array,
which the grid-minimization tests rely on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Acvf, DomainError
from .mafit import validate_acvf

__all__ = [
    "Mse0Breakdown",
    "q0",
    "bias_gamma0",
    "bias_gammah",
    "p1",
    "lambda_r",
    "p2",
    "p3",
    "mse_gamma0",
    "extended_bias_gamma0",
    "f_h",
    "v_h",
    "signal_factor_T",
]


def _out(x):
    x = np.asarray(x, dtype=float)
    return x.item() if x.ndim == 0 else x


def q0(m: int, d):
    """Bias factor of gamma0_hat: (m+1)(d^2+1) / (2(d^2+d+1))."""
    if int(m) < 1:
        raise DomainError("q0 requires m >= 1")
    d = np.asarray(d, dtype=float)
    return _out((m + 1) * (d * d + 1.0) / (2.0 * (d * d + d + 1.0)))


def _check_n(m: int, n: int) -> int:
    nm = int(n) - 2 * (int(m) + 1)
    if nm <= 0:
        raise DomainError(f"need n > 2(m+1): n={n}, m={m}")
    return nm


def bias_gamma0(m: int, d, jk: float, n: int):
    """Exact noiseless value of gamma0_hat minus gamma_0: q0(m,d) * J_K / n_m."""
    if jk < 0:
        raise DomainError("quadratic variation must be >= 0")
    nm = _check_n(m, n)
    return _out(q0(m, d) * jk / nm)


def bias_gammah(m: int, h: int, d, jk: float, n: int, form: str = "exact"):
    """Bias of the lag-h estimate.

    form="exact" uses the finite-sample denominators of the two components:
    q0(m,d) J_K / n_m  -  h J_K / (2(n-h)).  form="asymptotic" is the
    common-n version (q0(m,d) - h/2) J_K / n, which vanishes identically at
    d = optimal_weight(m, h) on the 3h >= 2(m+1) branch.
    """
    m, h, n = int(m), int(h), int(n)
    if not 1 <= h <= m:
        raise DomainError(f"lag h={h} must satisfy 1 <= h <= m={m}")
    if jk < 0:
        raise DomainError("quadratic variation must be >= 0")
    nm = _check_n(m, n)
    if form == "exact":
        return _out(q0(m, d) * jk / nm - h * jk / (2.0 * (n - h)))
    if form == "asymptotic":
        return _out((q0(m, d) - h / 2.0) * jk / n)
    raise DomainError("form must be 'exact' or 'asymptotic'")


def _weight_poly(m: int, h: int, d):
    return (2.0 * (m + 1) - 3.0 * h) * (d ** 4 + 1.0) + d * d * h


def _require_validated(m: int, acvf: Acvf):
    if acvf.m != int(m):
        raise DomainError(f"acvf order {acvf.m} does not match m={m}")
    if not validate_acvf(acvf):
        raise DomainError("acvf fails spectral non-negativity; variance formulas need a valid model")


def p1(m: int, d, acvf: Acvf):
    """Signal-aligned variance coefficient:
    [2(m+1)(d^4+1) + 2 sum_h ((2(m+1)-3h)(d^4+1) + d^2 h) rho_h] / (d^2+d+1)^2.
    """
    m = int(m)
    _require_validated(m, acvf)
    d = np.asarray(d, dtype=float)
    rho = acvf.gamma / acvf.gamma[0]
    s = np.zeros_like(d)
    for h in range(1, m + 1):
        s = s + _weight_poly(m, h, d) * rho[h]
    return _out((2.0 * (m + 1) * (d ** 4 + 1.0) + 2.0 * s) / (d * d + d + 1.0) ** 2)


def lambda_r(m: int, d: float, acvf: Acvf, r: int) -> float:
    """Lag-r fourth-moment term of the noise variance; identically zero for
    r >= 3(m+1).  Lags beyond m read as zero inside the index arithmetic."""
    m, r = int(m), int(r)
    if r < 1:
        raise DomainError("r must be a positive integer")
    _require_validated(m, acvf)
    d = float(d)
    g_r = acvf.at(r)
    g_a = acvf.at(abs(r - (m + 1)))
    g_b = acvf.at(abs(r - 2 * (m + 1)))
    q = d * d + d + 1.0
    return (
        8.0 * q * q * g_r * g_r
        + 2.0 * (1.0 + d) ** 4 * g_a * g_a
        + 2.0 * d * d * g_b * g_b
        - 4.0 * (1.0 + d) * ((1.0 + d) ** 3 + (d ** 3 + d * d + d + 1.0)) * g_r * g_a
        - 4.0 * d * (d + 1.0) ** 2 * g_a * g_b
    )


def p2(m: int, d: float, acvf: Acvf) -> float:
    """Leading noise-variance coefficient: [P^2 + sum_h Lambda_h / gamma_0^2]
    / (2(1+d+d^2)^2) with P = 2(d^2+d+1)."""
    m = int(m)
    _require_validated(m, acvf)
    d = float(d)
    q = d * d + d + 1.0
    g0sq = acvf.gamma[0] ** 2
    s = sum(lambda_r(m, d, acvf, h) for h in range(1, 3 * m + 3)) / g0sq
    return (4.0 * q * q + s) / (2.0 * q * q)


def p3(m: int, d: float, acvf: Acvf) -> float:
    """Lag-weighted remainder coefficient: -(1/P^2) sum_h h Lambda_h / gamma_0^2."""
    m = int(m)
    _require_validated(m, acvf)
    d = float(d)
    P2 = 4.0 * (d * d + d + 1.0) ** 2
    g0sq = acvf.gamma[0] ** 2
    s = sum(h * lambda_r(m, d, acvf, h) for h in range(1, 3 * m + 3)) / g0sq
    return -s / P2


@dataclass
class Mse0Breakdown:
    """MSE decomposition of gamma0_hat: squared bias plus the three variance
    pieces (signal-aligned, leading noise, lag-weighted remainder)."""

    bias2: float
    var_signal: float
    var_noise: float
    var_remainder: float
    total: float


def mse_gamma0(m: int, d: float, acvf: Acvf, jk: float, n: int,
               form: str = "exact") -> Mse0Breakdown:
    """Assemble the MSE of gamma0_hat for Gaussian m-dependent noise.

    form="exact" normalizes every piece by the trimmed count n_m = n - 2(m+1)
    and doubles the remainder coefficient; with J_K = 0 the total then equals
    the finite-sample variance of the Gaussian quadratic form identically
    (the tests check this to 1e-12).  form="paper" is the plain-n asymptotic
    assembly with the single-weight remainder.
    """
    m, n = int(m), int(n)
    _require_validated(m, acvf)
    if jk < 0:
        raise DomainError("quadratic variation must be >= 0")
    nm = _check_n(m, n)
    g0 = float(acvf.gamma[0])
    if form == "exact":
        N, rem_factor = nm, 2.0
    elif form == "paper":
        N, rem_factor = n, 1.0
    else:
        raise DomainError("form must be 'exact' or 'paper'")
    bias2 = float(q0(m, d) * jk / N) ** 2
    var_signal = p1(m, d, acvf) * g0 * jk / N ** 2
    var_noise = p2(m, d, acvf) * g0 * g0 / N
    var_remainder = rem_factor * p3(m, d, acvf) * g0 * g0 / N ** 2
    total = bias2 + var_signal + var_noise + var_remainder
    return Mse0Breakdown(bias2, float(var_signal), float(var_noise),
                         float(var_remainder), float(total))


def extended_bias_gamma0(m: int, d, acvf: Acvf, jk: float, n: int):
    """Signal-dependent part of the MSE: squared bias plus n^{-2} p1 gamma_0 J_K."""
    m, n = int(m), int(n)
    _require_validated(m, acvf)
    if jk < 0:
        raise DomainError("quadratic variation must be >= 0")
    nm = _check_n(m, n)
    b = q0(m, d) * jk / nm
    return _out(b * b + p1(m, d, acvf) * float(acvf.gamma[0]) * jk / n ** 2)


def f_h(acvf: Acvf, h: int) -> float:
    """Signal-aligned variance factor of the gap-h difference statistic."""
    h = int(h)
    if not 1 <= h <= acvf.m:
        raise DomainError(f"lag h={h} must satisfy 1 <= h <= m={acvf.m}")
    g = acvf.at
    if h == 1:
        return 2.0 * (g(0) - g(1))
    s = 0.0
    for j in range(2, h + 1):
        for i in range(1, j + 2):
            s += 2.0 * g(j - i) - g(j - i - h) - g(j - i + h)
    return 2.0 * ((h - 1) * (g(0) - g(h)) + s)


def v_h(acvf: Acvf, m: int, h: int) -> float:
    """Cross-moment factor between the two estimator components:
    sum_{s=0..m} sum_{t=1..h} gamma_{s+t} - sum_{s=1..m+1} sum_{t=1..h} gamma_{|t-s|}."""
    m, h = int(m), int(h)
    if acvf.m != m:
        raise DomainError(f"acvf order {acvf.m} does not match m={m}")
    if not 1 <= h <= m:
        raise DomainError(f"lag h={h} must satisfy 1 <= h <= m={m}")
    g = acvf.at
    first = sum(g(s + t) for s in range(0, m + 1) for t in range(1, h + 1))
    second = sum(g(t - s) for s in range(1, m + 2) for t in range(1, h + 1))
    return first - second


def signal_factor_T(m: int, d, r: int):
    """Signal factor of the lag-r product sum of the noiseless second-order
    differences: sum_i delta_i(d) delta_{i+r}(d) = T_r(d) * J_K under the
    separation condition.

    The d-linear (cross-window) terms carry a negative sign; the brute-force
    summation tests pin this down.
    """
    m, r = int(m), int(r)
    if m < 1 or r < 0:
        raise DomainError("need m >= 1 and r >= 0")
    d = np.asarray(d, dtype=float)
    if r <= m:
        out = (m + 1 - r) * d * d - r * d + (m + 1 - r)
    elif r <= 2 * m + 1:
        out = -d * (2.0 * (m + 1) - r)
    else:
        out = np.zeros_like(d)
    return _out(out)
