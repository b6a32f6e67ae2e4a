"""Nearest symmetric PSD banded-Toeplitz matrix in Frobenius norm.

Alternating projections between the PSD cone (eigenvalue clamping) and the
banded-Toeplitz subspace (diagonal averaging), with Dykstra's correction on
the cone so the iterates converge to the true projection onto the
intersection.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import DomainError

__all__ = [
    "BandedToeplitz",
    "ProjectionReport",
    "project_psd",
    "project_toeplitz_banded",
    "near_psd_toeplitz",
    "covariance_matrix_estimate",
]

SYMMETRY_ATOL = 1e-12


@dataclass
class BandedToeplitz:
    """Symmetric (m+1)-banded Toeplitz matrix stored by its first row."""

    n: int
    m: int
    first_row: np.ndarray

    def __post_init__(self):
        self.n = int(self.n)
        self.m = int(self.m)
        self.first_row = np.atleast_1d(np.asarray(self.first_row, dtype=float))
        if self.n < 1 or not 0 <= self.m <= self.n - 1:
            raise DomainError(f"need 0 <= m <= n-1, got n={self.n}, m={self.m}")
        if self.first_row.shape != (self.m + 1,):
            raise DomainError("first_row must hold exactly m + 1 entries")

    def dense(self) -> np.ndarray:
        a = np.zeros((self.n, self.n))
        i = np.arange(self.n)
        a[i, i] = self.first_row[0]
        for k in range(1, self.m + 1):
            a[i[:-k], i[:-k] + k] = self.first_row[k]
            a[i[:-k] + k, i[:-k]] = self.first_row[k]
        return a


@dataclass
class ProjectionReport:
    """Convergence diagnostics of the alternating projection run.

    ``distances`` logs ||P_k - X_k||_F per cycle (non-increasing after the
    first cycle)."""

    iterations: int
    final_delta: float
    converged: bool
    min_eigenvalue: float
    distances: list = field(default_factory=list, repr=False)


def _as_symmetric(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("expected a square matrix")
    if not np.allclose(a, a.T, rtol=0.0, atol=SYMMETRY_ATOL):
        raise DomainError("matrix is not symmetric (tolerance 1e-12)")
    return (a + a.T) / 2.0


def project_psd(a) -> np.ndarray:
    """Nearest PSD matrix: eigendecompose, clamp negative eigenvalues to zero."""
    s = _as_symmetric(a)
    w, q = np.linalg.eigh(s)
    out = (q * np.maximum(w, 0.0)) @ q.T
    return (out + out.T) / 2.0


def project_toeplitz_banded(a, m: int) -> BandedToeplitz:
    """Orthogonal projection onto (m+1)-banded symmetric Toeplitz matrices:
    per-diagonal averaging, zero beyond the band."""
    s = _as_symmetric(a)
    n = s.shape[0]
    m = int(m)
    if not 0 <= m <= n - 1:
        raise DomainError(f"need 0 <= m <= n-1, got n={n}, m={m}")
    first_row = np.array([float(np.mean(np.diagonal(s, k))) for k in range(m + 1)])
    return BandedToeplitz(n, m, first_row)


def near_psd_toeplitz(a, m: int, tol: float = 1e-10,
                      max_iter: int = 10_000) -> tuple[BandedToeplitz, ProjectionReport]:
    """Project a symmetric matrix onto the PSD (m+1)-banded Toeplitz set.

    Dykstra-corrected cycle: R_k = P_{k-1} - DC_{k-1}; X_k = psd(R_k);
    DC_k = X_k - R_k; P_k = toeplitz(X_k).  Stops when both the Frobenius
    change of P_k and its PSD violation fall below ``tol``.  On truncation the
    current banded-Toeplitz iterate is still returned with converged=False.
    """
    if not tol > 0.0:
        raise DomainError("tol must be positive")
    max_iter = int(max_iter)
    if max_iter < 1:
        raise DomainError("max_iter must be >= 1")
    p_prev = _as_symmetric(a)
    dc = np.zeros_like(p_prev)
    distances: list[float] = []
    converged = False
    iterations = 0
    delta = np.inf
    bt = project_toeplitz_banded(p_prev, m)
    for iterations in range(1, max_iter + 1):
        r = p_prev - dc
        x = project_psd(r)
        dc = x - r
        bt = project_toeplitz_banded(x, m)
        p = bt.dense()
        delta = float(np.linalg.norm(p - p_prev, "fro"))
        distances.append(float(np.linalg.norm(p - x, "fro")))
        p_prev = p
        if delta <= tol:
            violation = max(0.0, -float(np.linalg.eigvalsh(p)[0]))
            if violation <= tol:
                converged = True
                break
    min_eig = float(np.linalg.eigvalsh(p_prev)[0])
    return bt, ProjectionReport(iterations, delta, converged, min_eig, distances)


def covariance_matrix_estimate(e, n: int, tol: float = 1e-10,
                               max_iter: int = 10_000) -> tuple[BandedToeplitz, ProjectionReport]:
    """Embed an autocovariance (estimate) as an n x n banded Toeplitz matrix
    and repair it to the nearest PSD banded Toeplitz matrix.

    Accepts anything with ``m`` and ``gamma`` attributes (AcvfEstimate, Acvf).
    """
    m = int(e.m)
    gamma = np.asarray(e.gamma, dtype=float)
    n = int(n)
    if n < m + 1:
        raise DomainError(f"need n >= m+1, got n={n}, m={m}")
    raw = BandedToeplitz(n, m, gamma).dense()
    return near_psd_toeplitz(raw, m, tol=tol, max_iter=max_iter)
