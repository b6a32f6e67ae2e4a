"""Difference-based autocovariance estimation under a step signal.

Three building blocks: the ordinary gap-h squared differences, second-order
differences at gap m+1 with a free weight d, and their combination per lag.
`dbacf` applies the bias-optimized weights and returns the full estimate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Acvf, DomainError, as_series

__all__ = [
    "AcvfEstimate",
    "ordinary_diff",
    "gamma0_hat",
    "gammah_hat",
    "optimal_weight",
    "dbacf",
    "acf_from_estimate",
]


@dataclass
class AcvfEstimate:
    """Raw autocovariance estimates plus the weight d used for each lag.

    ``gamma`` is stored unvalidated: estimates may be degenerate (e.g. all
    zeros on a constant series) or fail positive semidefiniteness; repair is
    the projection module's job.  ``acvf`` converts to a validated
    :class:`~dbacv.core.Acvf` and raises if gamma_0 <= 0.
    """

    m: int
    gamma: np.ndarray
    weights_used: np.ndarray
    n: int

    def __post_init__(self):
        self.m = int(self.m)
        self.n = int(self.n)
        self.gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        self.weights_used = np.atleast_1d(np.asarray(self.weights_used, dtype=float))
        if self.gamma.shape != (self.m + 1,) or self.weights_used.shape != (self.m + 1,):
            raise DomainError("gamma and weights_used must hold exactly m + 1 entries")

    @property
    def acvf(self) -> Acvf:
        return Acvf(self.m, self.gamma)


def ordinary_diff(y, h: int) -> float:
    """Mean squared gap-h difference: sum of (y_i - y_{i+h})^2 / (2(n-h))."""
    y = as_series(y)
    n = y.size
    h = int(h)
    if not 1 <= h < n:
        raise DomainError(f"gap h={h} must satisfy 1 <= h < n={n}")
    d = y[: n - h] - y[h:]
    return float(d @ d) / (2.0 * (n - h))


def gamma0_hat(y, m: int, d: float) -> float:
    """Variance estimate from second-order differences at gap m+1, weight d.

    (1+d+d^2)^{-1} / (2 n_m) * sum_i (y_i - (1+d) y_{i+m+1} + d y_{i+2(m+1)})^2
    with n_m = n - 2(m+1).
    """
    y = as_series(y)
    n = y.size
    m = int(m)
    if m < 0:
        raise DomainError("m must be >= 0")
    M = m + 1
    nm = n - 2 * M
    if nm <= 0:
        raise DomainError(f"need n > 2(m+1): n={n}, m={m}")
    d = float(d)
    b = y[:nm] - (1.0 + d) * y[M:M + nm] + d * y[2 * M:2 * M + nm]
    return float(b @ b) / (2.0 * (1.0 + d + d * d) * nm)


def gammah_hat(y, m: int, h: int, d: float) -> float:
    """Lag-h autocovariance estimate: gamma0_hat(y, m, d) - ordinary_diff(y, h)."""
    if not 1 <= int(h) <= int(m):
        raise DomainError(f"lag h={h} must satisfy 1 <= h <= m={m}")
    return gamma0_hat(y, m, d) - ordinary_diff(y, h)


def optimal_weight(m: int, h: int, root: str = "minus") -> float:
    """Bias-optimizing weight d for the lag-h estimate.

    Returns 1 when 3h < 2(m+1) (h = 0 included).  Otherwise returns a root of
    the zero-bias quadratic (m+1-h) d^2 - h d + (m+1-h) = 0; the discriminant
    is non-negative exactly on this branch.  ``root`` selects "minus" (the
    smaller root, in (0, 1]) or "plus".
    """
    m, h = int(m), int(h)
    if m < 1 or not 0 <= h <= m:
        raise DomainError(f"need m >= 1 and 0 <= h <= m, got m={m}, h={h}")
    if root not in ("minus", "plus"):
        raise DomainError("root must be 'minus' or 'plus'")
    if 3 * h < 2 * (m + 1):
        return 1.0
    a = m + 1 - h
    s = math.sqrt(h * h - 4.0 * a * a)
    return (h - s) / (2.0 * a) if root == "minus" else (h + s) / (2.0 * a)


def dbacf(y, m: int) -> AcvfEstimate:
    """Estimate gamma_0..gamma_m with the bias-optimized weights.

    gamma_0 uses d=1; lag h uses d = optimal_weight(m, h).
    """
    y = as_series(y)
    m = int(m)
    gam = [gamma0_hat(y, m, 1.0)]
    weights = [1.0]
    for h in range(1, m + 1):
        d = optimal_weight(m, h)
        gam.append(gammah_hat(y, m, h, d))
        weights.append(d)
    return AcvfEstimate(m, np.array(gam), np.array(weights), y.size)


def acf_from_estimate(e: AcvfEstimate) -> np.ndarray:
    """Autocorrelations rho_h = gamma_h / gamma_0; rejects degenerate gamma_0."""
    if e.gamma[0] <= 0.0:
        raise DomainError("degenerate estimate: gamma_0 <= 0; cannot normalize")
    return e.gamma / e.gamma[0]
