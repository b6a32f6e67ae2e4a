"""Core domain types: observation series, step signals, autocovariance functions.

Series are plain 1-D float arrays validated through :func:`as_series`.  All
types are treated as immutable after construction; every operation here is
pure and safe to call concurrently.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "ConvergenceError",
    "as_series",
    "StepSignal",
    "Acvf",
    "change_indices",
    "sample_signal",
    "quadratic_variation",
    "separation_ok",
]


class DomainError(ValueError):
    """An operation was called outside its domain (bad sizes, lags, orders)."""


class ConvergenceError(RuntimeError):
    """An iterative routine failed to reach its tolerance."""


def as_series(values) -> np.ndarray:
    """Validate and return a series as a 1-D float array (n >= 1, all finite)."""
    y = np.asarray(values, dtype=float)
    if y.ndim != 1 or y.size < 1:
        raise DomainError("series must be a non-empty 1-D array")
    if not np.all(np.isfinite(y)):
        raise DomainError("series values must be finite")
    return y


@dataclass
class StepSignal:
    """Piecewise-constant signal on [0, 1): K-1 change fractions and K levels.

    ``taus`` must be strictly increasing inside the open interval (0, 1) and
    adjacent levels must differ.  A constant signal has empty ``taus`` and a
    single level.
    """

    taus: np.ndarray
    levels: np.ndarray

    def __post_init__(self):
        self.taus = np.atleast_1d(np.asarray(self.taus, dtype=float))
        self.levels = np.atleast_1d(np.asarray(self.levels, dtype=float))
        if self.levels.size != self.taus.size + 1:
            raise DomainError("need one level per segment: len(levels) == len(taus) + 1")
        if self.taus.size and not (np.all(self.taus > 0.0) and np.all(self.taus < 1.0)):
            raise DomainError("change fractions must lie in the open interval (0, 1)")
        if self.taus.size > 1 and not np.all(np.diff(self.taus) > 0.0):
            raise DomainError("change fractions must be strictly increasing")
        if not np.all(np.isfinite(self.levels)):
            raise DomainError("levels must be finite")
        if self.levels.size > 1 and np.any(np.diff(self.levels) == 0.0):
            raise DomainError("adjacent segment levels must differ")

    @property
    def k(self) -> int:
        """Number of segments."""
        return self.levels.size


@dataclass
class Acvf:
    """Autocovariance function of an m-dependent process: gamma_0 .. gamma_m.

    gamma_0 must be positive.  Lags beyond m are identically zero; use
    :meth:`at` for clipped lookups.  Spectral validity (non-negative spectral
    density) is checked separately via ``mafit.validate_acvf``.
    """

    m: int
    gamma: np.ndarray

    def __post_init__(self):
        self.m = int(self.m)
        self.gamma = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        if self.m < 0:
            raise DomainError("dependence order m must be >= 0")
        if self.gamma.shape != (self.m + 1,):
            raise DomainError("gamma must hold exactly m + 1 lags")
        if not np.all(np.isfinite(self.gamma)):
            raise DomainError("gamma must be finite")
        if self.gamma[0] <= 0.0:
            raise DomainError("gamma_0 must be positive")

    def at(self, lag: int) -> float:
        """gamma at |lag|, zero beyond m."""
        lag = abs(int(lag))
        return float(self.gamma[lag]) if lag <= self.m else 0.0


def change_indices(signal: StepSignal, n: int) -> np.ndarray:
    """1-based grid index at which each new segment starts: floor(n * tau_j)."""
    return np.floor(n * signal.taus).astype(int)


def sample_signal(signal: StepSignal, n: int) -> np.ndarray:
    """Evaluate the signal on the grid x_i = i/n, i = 1..n.

    Segment j occupies indices floor(n*tau_j) (inclusive) up to the next
    change index (exclusive); segment 0 starts at index 1.  Rejects any n
    under which a segment would receive no grid point.
    """
    n = int(n)
    if n < signal.k:
        raise DomainError(f"n={n} is too small for {signal.k} segments")
    bounds = np.concatenate(([1], change_indices(signal, n), [n + 1]))
    if np.any(np.diff(bounds) < 1):
        raise DomainError("every segment must contain at least one grid point")
    f = np.empty(n)
    for j in range(signal.k):
        f[bounds[j] - 1:bounds[j + 1] - 1] = signal.levels[j]
    return f


def quadratic_variation(signal: StepSignal) -> float:
    """Sum of squared jump sizes over the interior change points."""
    return float(np.sum(np.diff(signal.levels) ** 2))


def separation_ok(signal: StepSignal, n: int, m: int) -> bool:
    """True iff consecutive change fractions (0 and 1 included) are more than
    4(m+1)/n apart; the spacing under which the noiseless difference sums are
    exact."""
    knots = np.concatenate(([0.0], signal.taus, [1.0]))
    return bool(np.min(np.diff(knots)) > 4.0 * (m + 1) / n)
