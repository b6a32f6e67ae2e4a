"""Moving-average models: exact autocovariance, spectral validation, and
fitting an invertible MA(m) to a given autocovariance via the innovations
recursion."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import Acvf, ConvergenceError, DomainError

__all__ = [
    "MaModel",
    "acvf_from_ma",
    "ma_from_acvf",
    "validate_acvf",
    "spectral_density_min",
]

NEAR_BOUNDARY_FRACTION = 1e-6


@dataclass
class MaModel:
    """MA(m) model: coefficients theta_1..theta_m (theta_0 = 1 implicit) and
    innovation variance sigma2 > 0."""

    theta: np.ndarray
    sigma2: float

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=float).reshape(-1)
        self.sigma2 = float(self.sigma2)
        if not np.all(np.isfinite(self.theta)):
            raise DomainError("theta must be finite")
        if not (np.isfinite(self.sigma2) and self.sigma2 > 0.0):
            raise DomainError("sigma2 must be positive")

    @property
    def m(self) -> int:
        return self.theta.size

    def is_invertible(self, margin: float = 0.0) -> bool:
        """True iff all roots of 1 + theta_1 z + ... + theta_m z^m lie outside
        the unit circle (radius > 1 + margin)."""
        coeffs = np.concatenate((self.theta[::-1], [1.0]))
        nz = np.nonzero(np.abs(coeffs) > 1e-14)[0]
        if nz.size == 0 or nz[0] == coeffs.size - 1:
            return True
        roots = np.roots(coeffs[nz[0]:])
        return bool(np.all(np.abs(roots) > 1.0 + margin))


def acvf_from_ma(model: MaModel) -> Acvf:
    """Exact autocovariance gamma_h = sigma2 * sum_j theta_j theta_{j+h}."""
    th = np.concatenate(([1.0], model.theta))
    q = th.size
    gamma = np.array([model.sigma2 * float(th[: q - h] @ th[h:]) for h in range(q)])
    return Acvf(model.m, gamma)


def spectral_density_min(acvf: Acvf, grid_size: int = 2048) -> float:
    """Minimum over a lambda grid on [-pi, pi] of gamma_0 + 2 sum gamma_h cos(h lambda)."""
    lam = np.linspace(-np.pi, np.pi, int(grid_size))
    h = np.arange(1, acvf.m + 1)
    f = acvf.gamma[0] + 2.0 * np.cos(np.outer(lam, h)) @ acvf.gamma[1:]
    return float(np.min(f)) if acvf.m else float(acvf.gamma[0])


def validate_acvf(acvf: Acvf, grid_size: int = 2048) -> bool:
    """True iff the implied spectral density is non-negative on the grid
    (tolerance -1e-12 * gamma_0)."""
    return spectral_density_min(acvf, grid_size) >= -1e-12 * acvf.gamma[0]


def ma_from_acvf(acvf: Acvf, max_iter: int = 200, tol: float = 1e-10) -> MaModel:
    """Fit an invertible MA(m) whose autocovariance reproduces ``acvf``.

    Runs the innovations recursion on the m-dependent autocovariance until the
    coefficients stabilize and the fitted model's autocovariance matches the
    input within ``tol * max(1, gamma_0)`` in max norm.  Raises
    ConvergenceError when the recursion stalls (spectral density at or near
    zero) or produces a non-invertible limit.
    """
    if not validate_acvf(acvf):
        raise DomainError("acvf has negative spectral density; no MA representation exists")
    smin = spectral_density_min(acvf)
    if smin < NEAR_BOUNDARY_FRACTION * acvf.gamma[0]:
        warnings.warn(
            "spectral density nearly touches zero; MA fit may converge slowly",
            RuntimeWarning,
        )
    m = acvf.m
    if m == 0:
        return MaModel(np.empty(0), float(acvf.gamma[0]))

    max_iter = int(max_iter)
    if max_iter < m:
        raise DomainError(f"max_iter={max_iter} must be at least m={m}")
    resid_tol = tol * max(1.0, float(acvf.gamma[0]))

    # A[n, j] stores theta_{n, n-j}, the coefficient paired with innovation
    # variance v_j in the recursion.
    v = np.empty(max_iter + 1)
    v[0] = acvf.gamma[0]
    A = np.zeros((max_iter + 1, max_iter + 1))
    prev = np.zeros(m)
    change = np.inf
    resid = np.inf
    theta = prev
    for n in range(1, max_iter + 1):
        for k in range(n):
            s = A[k, :k] @ (A[n, :k] * v[:k]) if k else 0.0
            A[n, k] = (acvf.at(n - k) - s) / v[k]
        v[n] = acvf.gamma[0] - float((A[n, :n] ** 2) @ v[:n])
        if v[n] <= 0.0:
            raise ConvergenceError(
                f"innovation variance became non-positive at step {n} "
                f"(spectral minimum {smin:.3e}); acvf is at the invertibility boundary"
            )
        take = min(m, n)
        theta = np.zeros(m)
        theta[:take] = A[n, n - 1 - np.arange(take)]
        change = float(np.max(np.abs(theta - prev)))
        prev = theta
        if n >= m and change <= tol:
            cand = MaModel(theta, float(v[n]))
            resid = float(np.max(np.abs(acvf_from_ma(cand).gamma - acvf.gamma)))
            if resid <= resid_tol:
                if not cand.is_invertible(margin=-1e-8):
                    raise ConvergenceError(
                        "innovations recursion converged to a non-invertible model "
                        f"(spectral minimum {smin:.3e})"
                    )
                return cand
    raise ConvergenceError(
        f"MA fit did not converge in {max_iter} iterations: last coefficient "
        f"change {change:.3e}, roundtrip residual {resid:.3e}, spectral minimum {smin:.3e}"
    )
