"""Multiscale jump segmentation for m-dependent noise (JUSD).

Partial sums over a family of intervals are normalized by their exact
variance under the (estimated) autocovariance; a Monte Carlo null quantile of
the max statistic calibrates a minimal-changepoint segmentation solved by
dynamic programming.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import Acvf, DomainError, as_series
from .mafit import MaModel, acvf_from_ma, validate_acvf
from .sim import gen_ma, replicate_rng

__all__ = [
    "IntervalSystem",
    "StepFit",
    "build_intervals",
    "partial_sum_variance",
    "local_stat",
    "null_quantile",
    "segment",
]


@dataclass
class IntervalSystem:
    """Family of index intervals (1-based, inclusive) on a length-n grid."""

    starts: np.ndarray
    ends: np.ndarray
    n: int
    mode: str = "custom"

    def __post_init__(self):
        self.starts = np.atleast_1d(np.asarray(self.starts, dtype=int))
        self.ends = np.atleast_1d(np.asarray(self.ends, dtype=int))
        self.n = int(self.n)
        if self.starts.shape != self.ends.shape:
            raise DomainError("starts and ends must have equal length")
        if self.starts.size == 0:
            raise DomainError("interval system must be non-empty")
        if np.any(self.starts < 1) or np.any(self.ends > self.n) or np.any(self.starts > self.ends):
            raise DomainError("intervals must satisfy 1 <= i <= j <= n")
        pairs = np.unique(np.stack([self.ends, self.starts], axis=1), axis=0)
        self.ends, self.starts = pairs[:, 0], pairs[:, 1]

    def __len__(self) -> int:
        return self.starts.size

    @property
    def lengths(self) -> np.ndarray:
        return self.ends - self.starts + 1


def build_intervals(n: int, mode: str = "dyadic") -> IntervalSystem:
    """Interval family on 1..n.

    mode="full": all (i, j) with i <= j.  mode="dyadic": power-of-two lengths
    with starts stepped by max(1, L/2), an O(n log n)-sized multiscale subset.
    """
    n = int(n)
    if n < 2:
        raise DomainError("n must be >= 2")
    starts, ends = [], []
    if mode == "full":
        for i in range(1, n + 1):
            for j in range(i, n + 1):
                starts.append(i)
                ends.append(j)
    elif mode == "dyadic":
        length = 1
        while length <= n:
            step = max(1, length // 2)
            for i in range(1, n - length + 2, step):
                starts.append(i)
                ends.append(i + length - 1)
            length *= 2
    else:
        raise DomainError("mode must be 'full' or 'dyadic'")
    return IntervalSystem(np.array(starts), np.array(ends), n, mode)


def partial_sum_variance(acvf: Acvf, length: int) -> float:
    """Exact variance of a length-`length` partial sum of the m-dependent
    process: len*gamma_0 + 2 sum_k (len-k)_+ gamma_k."""
    length = int(length)
    if length < 1:
        raise DomainError("length must be >= 1")
    out = length * acvf.gamma[0]
    for k in range(1, acvf.m + 1):
        out += 2.0 * max(length - k, 0) * acvf.gamma[k]
    return float(out)


def _variance_of_lengths(acvf: Acvf, lengths: np.ndarray) -> np.ndarray:
    lengths = np.asarray(lengths, dtype=float)
    out = lengths * acvf.gamma[0]
    for k in range(1, acvf.m + 1):
        out = out + 2.0 * np.maximum(lengths - k, 0.0) * acvf.gamma[k]
    return out


def local_stat(y, i: int, j: int, mu: float, acvf: Acvf) -> float:
    """Variance-normalized deviation of the partial sum over [i, j] (1-based,
    inclusive) from the hypothesized level mu aggregated over the interval:
    |S - (j-i+1) mu|^2 / Var(S)."""
    y = as_series(y)
    i, j = int(i), int(j)
    if not 1 <= i <= j <= y.size:
        raise DomainError("need 1 <= i <= j <= n")
    length = j - i + 1
    s = float(np.sum(y[i - 1:j]))
    return (s - length * mu) ** 2 / partial_sum_variance(acvf, length)


def null_quantile(model: MaModel, n: int, alpha: float, reps: int, seed: int,
                  intervals: IntervalSystem, chunk: int = 256) -> float:
    """Empirical (1-alpha) quantile of the max interval statistic under the
    zero-mean Gaussian MA null (statistics centered at the true mean 0).

    Replicate r draws from the stream (seed, r), so the result only depends
    on (model, n, alpha, reps, seed, intervals).
    """
    n = int(n)
    reps = int(reps)
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must be in (0, 1)")
    if reps < 100:
        raise DomainError("reps must be >= 100")
    if intervals.n != n:
        raise DomainError("interval system was built for a different n")
    acvf = acvf_from_ma(model)
    var_i = _variance_of_lengths(acvf, intervals.lengths)
    e_idx = intervals.ends
    s_idx = intervals.starts - 1
    maxstats = np.empty(reps)
    for lo in range(0, reps, int(chunk)):
        hi = min(lo + int(chunk), reps)
        sims = np.stack([gen_ma(model, n, replicate_rng(seed, r)) for r in range(lo, hi)])
        pref = np.concatenate([np.zeros((hi - lo, 1)), np.cumsum(sims, axis=1)], axis=1)
        s = pref[:, e_idx] - pref[:, s_idx]
        maxstats[lo:hi] = np.max(s * s / var_i, axis=1)
    return float(np.quantile(maxstats, 1.0 - alpha))


@dataclass
class StepFit:
    """Segmentation output: 1-based first index of each new segment, the
    per-segment levels, and the threshold used."""

    changepoints: np.ndarray
    levels: np.ndarray
    k_hat: int
    quantile_used: float
    alpha: float = float("nan")

    def __post_init__(self):
        self.changepoints = np.atleast_1d(np.asarray(self.changepoints, dtype=int))
        self.levels = np.atleast_1d(np.asarray(self.levels, dtype=float))
        self.k_hat = int(self.k_hat)
        if self.k_hat != self.changepoints.size:
            raise DomainError("k_hat must equal the number of change points")
        if self.levels.size != self.k_hat + 1:
            raise DomainError("levels must hold k_hat + 1 entries")
        if self.changepoints.size > 1 and not np.all(np.diff(self.changepoints) > 0):
            raise DomainError("changepoints must be strictly increasing")


def segment(y, acvf: Acvf, q: float, intervals: IntervalSystem,
            alpha: float = float("nan")) -> StepFit:
    """Minimal-changepoint step fit subject to the multiscale constraint.

    Fits the step function with the fewest segments such that every interval
    of the system lying inside a fitted segment satisfies
    local_stat(y, i, j, segment mean, acvf) <= q; ties in the segment count
    are broken by maximizing the sum of log segment lengths.  Levels are the
    per-segment sample means.
    """
    y = as_series(y)
    n = y.size
    if intervals.n != n:
        raise DomainError("interval system was built for a different n")
    if not q > 0.0:
        raise DomainError("threshold q must be positive")
    if not validate_acvf(acvf):
        raise DomainError("acvf fails spectral non-negativity")

    pref = np.concatenate(([0.0], np.cumsum(y)))
    lengths = intervals.lengths
    s_all = pref[intervals.ends] - pref[intervals.starts - 1]
    half = np.sqrt(q * _variance_of_lengths(acvf, lengths))
    # per-interval admissible band for a segment level
    lo_all = (s_all - half) / lengths
    hi_all = (s_all + half) / lengths

    def fit_from_bounds(bounds):
        cps = np.array([s for s, _ in bounds[1:]], dtype=int)
        levels = np.array([float(np.mean(y[s - 1:e])) for s, e in bounds])
        return StepFit(cps, levels, cps.size, float(q), alpha)

    mean_all = pref[n] / n
    if np.all((lo_all <= mean_all) & (mean_all <= hi_all)):
        return fit_from_bounds([(1, n)])

    by_end_start: list[list[int]] = [[] for _ in range(n + 1)]
    by_end_pos: list[list[int]] = [[] for _ in range(n + 1)]
    for pos, (s, e) in enumerate(zip(intervals.starts, intervals.ends)):
        by_end_start[e].append(s - 1)
        by_end_pos[e].append(pos)

    best_lo = np.full(n, -np.inf)
    best_hi = np.full(n, np.inf)
    dp = np.full(n + 1, np.inf)
    dp[0] = 0.0
    score = np.zeros(n + 1)
    parent = np.zeros(n + 1, dtype=int)
    log_len = np.log(np.arange(1, n + 1, dtype=float))

    for end in range(1, n + 1):
        for s0, pos in zip(by_end_start[end], by_end_pos[end]):
            if lo_all[pos] > best_lo[s0]:
                best_lo[s0] = lo_all[pos]
            if hi_all[pos] < best_hi[s0]:
                best_hi[s0] = hi_all[pos]
        # tightest bounds over intervals contained in [s, end], per start s
        lo_suf = np.maximum.accumulate(best_lo[end - 1::-1])[::-1]
        hi_suf = np.minimum.accumulate(best_hi[end - 1::-1])[::-1]
        seg_len = np.arange(end, 0, -1, dtype=float)
        means = (pref[end] - pref[:end]) / seg_len
        feasible = (lo_suf <= means) & (means <= hi_suf)
        cand = np.where(feasible, dp[:end] + 1.0, np.inf)
        best = cand.min()
        dp[end] = best
        tie = np.where(cand == best, score[:end] + log_len[end - 1::-1], -np.inf)
        j = int(np.argmax(tie))
        parent[end] = j
        score[end] = tie[j]

    bounds = []
    pos = n
    while pos > 0:
        j = parent[pos]
        bounds.append((j + 1, pos))
        pos = j
    bounds.reverse()
    return fit_from_bounds(bounds)
