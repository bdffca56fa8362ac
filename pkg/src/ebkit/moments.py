"""Classical sample moments and descriptive statistics for interval-valued data.

Interval statistics treat each observation ``[l, u]`` as a uniform
distribution on the interval and average over observations, so that an
interval sample behaves like an equally weighted mixture of uniforms.
Every statistic has a bound form and an equivalent center/half-width form;
both are implemented and the center form is used by default because it is
better conditioned for narrow intervals far from the origin.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptySample, InvalidInterval, LengthMismatch, ZeroVariance


@dataclass(frozen=True)
class MomentSummary:
    """First four central moments of a univariate sample.

    ``mu2``..``mu4`` use denominator ``n``. Skewness and kurtosis are exposed
    as properties that raise :class:`ZeroVariance` for a constant sample.
    """

    n: int
    mu1: float
    mu2: float
    mu3: float
    mu4: float

    @property
    def zero_variance(self) -> bool:
        return self.mu2 <= 0.0

    @property
    def beta1(self) -> float:
        if self.zero_variance:
            raise ZeroVariance("skewness undefined for a zero-variance sample")
        return self.mu3 / self.mu2**1.5

    @property
    def beta2(self) -> float:
        if self.zero_variance:
            raise ZeroVariance("kurtosis undefined for a zero-variance sample")
        return self.mu4 / self.mu2**2

    @classmethod
    def from_standardized(
        cls, mu2: float, beta1: float, beta2: float, mu1: float = 0.0, n: int = 0
    ) -> "MomentSummary":
        """Build a summary from variance, skewness and kurtosis."""
        if mu2 <= 0:
            raise ZeroVariance("mu2 must be positive")
        return cls(
            n=n,
            mu1=float(mu1),
            mu2=float(mu2),
            mu3=float(beta1) * mu2**1.5,
            mu4=float(beta2) * mu2**2,
        )

    def to_dict(self) -> dict:
        d = {"n": self.n, "mu1": self.mu1, "mu2": self.mu2, "mu3": self.mu3, "mu4": self.mu4}
        if not self.zero_variance:
            d["beta1"] = self.beta1
            d["beta2"] = self.beta2
        return d


def classical_moments(sample: Iterable[float]) -> MomentSummary:
    """Central moments (denominator n) of a real sample.

    Raises:
        EmptySample: fewer than two values.
    """
    x = np.asarray(list(sample) if not isinstance(sample, np.ndarray) else sample, dtype=float)
    x = x.ravel()
    if x.size < 2:
        raise EmptySample(f"need at least 2 values, got {x.size}")
    # a constant sample must give exactly zero variance despite rounding in the mean
    mu1 = float(x[0]) if x.min() == x.max() else float(np.mean(x))
    d = x - mu1
    d2 = d * d
    return MomentSummary(
        n=int(x.size),
        mu1=mu1,
        mu2=float(np.mean(d2)),
        mu3=float(np.mean(d2 * d)),
        mu4=float(np.mean(d2 * d2)),
    )


@dataclass(frozen=True)
class IntervalBox:
    """A p-dimensional interval observation ``[lower, upper]``."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lo = np.atleast_1d(np.asarray(self.lower, dtype=float))
        hi = np.atleast_1d(np.asarray(self.upper, dtype=float))
        if lo.shape != hi.shape or lo.ndim != 1:
            raise LengthMismatch("lower and upper must be 1-D vectors of equal length")
        if np.any(lo > hi) or not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi))):
            raise InvalidInterval(f"invalid interval bounds {lo} > {hi}")
        object.__setattr__(self, "lower", lo)
        object.__setattr__(self, "upper", hi)

    @classmethod
    def from_center(cls, center, half_width) -> "IntervalBox":
        c = np.atleast_1d(np.asarray(center, dtype=float))
        r = np.atleast_1d(np.asarray(half_width, dtype=float))
        if np.any(r < 0):
            raise InvalidInterval("half-widths must be non-negative")
        return cls(c - r, c + r)

    @property
    def p(self) -> int:
        return self.lower.size

    @property
    def center(self) -> np.ndarray:
        return (self.lower + self.upper) / 2.0

    @property
    def half_width(self) -> np.ndarray:
        return (self.upper - self.lower) / 2.0


def as_bounds(intervals) -> tuple[np.ndarray, np.ndarray]:
    """Normalize interval input to ``(lower, upper)`` arrays of shape (n, p).

    Accepts a sequence of :class:`IntervalBox`, a sequence of ``(l, u)`` pairs
    (scalar intervals), or an array of shape ``(n, 2)`` / ``(n, p, 2)``.
    """
    if isinstance(intervals, tuple) and len(intervals) == 2 and isinstance(intervals[0], np.ndarray):
        lo, hi = (np.asarray(a, dtype=float) for a in intervals)
        if lo.ndim == 1:
            lo, hi = lo[:, None], hi[:, None]
    else:
        items = list(intervals)
        if items and isinstance(items[0], IntervalBox):
            lo = np.array([b.lower for b in items], dtype=float)
            hi = np.array([b.upper for b in items], dtype=float)
        else:
            arr = np.asarray(items, dtype=float)
            if arr.size == 0:
                return np.empty((0, 1)), np.empty((0, 1))
            if arr.ndim == 2 and arr.shape[1] == 2:
                arr = arr[:, None, :]
            if arr.ndim != 3 or arr.shape[2] != 2:
                raise LengthMismatch(f"cannot interpret intervals of shape {arr.shape}")
            lo, hi = arr[..., 0], arr[..., 1]
    if lo.shape != hi.shape:
        raise LengthMismatch("lower/upper shape mismatch")
    if np.any(lo > hi):
        raise InvalidInterval("found an interval with lower > upper")
    return lo, hi


def _scalar_bounds(intervals) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = as_bounds(intervals)
    if lo.shape[0] == 0:
        raise EmptySample("no intervals")
    if lo.shape[1] != 1:
        raise LengthMismatch("expected scalar intervals")
    return lo[:, 0], hi[:, 0]


def symbolic_mean(intervals: Sequence) -> float:
    """Mean of interval centers."""
    lo, hi = _scalar_bounds(intervals)
    return float(np.mean((lo + hi) / 2.0))


def symbolic_variance(intervals: Sequence, form: str = "center") -> float:
    """Variance of the uniform-mixture distribution of an interval sample.

    ``form="bounds"`` evaluates ``(1/3n) sum(u^2+ul+l^2) - xbar^2`` directly;
    ``form="center"`` uses ``(1/n) sum(c^2 + r^2/3) - cbar^2`` with the
    centered sum, which avoids cancellation.
    """
    lo, hi = _scalar_bounds(intervals)
    n = lo.size
    if form == "bounds":
        xbar = np.sum(lo + hi) / (2.0 * n)
        return float(np.sum(hi * hi + hi * lo + lo * lo) / (3.0 * n) - xbar * xbar)
    if form != "center":
        raise ValueError(f"unknown form {form!r}")
    c = (lo + hi) / 2.0
    r = (hi - lo) / 2.0
    dc = c - c.mean()
    return float(np.mean(dc * dc) + np.mean(r * r) / 3.0)


def symbolic_covariance(xi: Sequence, xj: Sequence, form: str = "center") -> float:
    """Symbolic covariance between two interval variables.

    Only centers enter, so ``symbolic_covariance(x, x)`` lacks the ``r^2/3``
    term present in :func:`symbolic_variance`.
    """
    li, ui = _scalar_bounds(xi)
    lj, uj = _scalar_bounds(xj)
    if li.size != lj.size:
        raise LengthMismatch(f"lengths differ: {li.size} vs {lj.size}")
    n = li.size
    if form == "bounds":
        si, sj = li + ui, lj + uj
        return float(np.sum(si * sj) / (4.0 * n) - np.sum(si) * np.sum(sj) / (4.0 * n * n))
    if form != "center":
        raise ValueError(f"unknown form {form!r}")
    ci = (li + ui) / 2.0
    cj = (lj + uj) / 2.0
    return float(np.mean((ci - ci.mean()) * (cj - cj.mean())))


def symbolic_covariance_matrix(lower: np.ndarray, upper: np.ndarray) -> np.ndarray:
    """p x p symbolic covariance of n interval vectors.

    The diagonal carries the within-interval ``r^2/3`` term (symbolic
    variance); off-diagonals use centers only.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.ndim == 1:
        lower, upper = lower[:, None], upper[:, None]
    n = lower.shape[0]
    if n == 0:
        raise EmptySample("no intervals")
    c = (lower + upper) / 2.0
    r = (upper - lower) / 2.0
    dc = c - c.mean(axis=0)
    cov = dc.T @ dc / n
    cov[np.diag_indices_from(cov)] += np.mean(r * r, axis=0) / 3.0
    return cov


def uniform_interval_variance(lo: float, hi: float) -> float:
    """Variance of a uniform distribution on ``[lo, hi]``."""
    if lo > hi:
        raise InvalidInterval(f"[{lo}, {hi}]")
    return (hi - lo) ** 2 / 12.0


def pearson_inequality_holds(m: MomentSummary, tol: float = 1e-12) -> bool:
    """Check ``beta2 >= 1 + beta1^2`` (always true for a real sample)."""
    if m.zero_variance:
        return True
    return m.beta2 >= 1.0 + m.beta1**2 - tol * max(1.0, abs(m.beta2))


__all__ = [
    "MomentSummary",
    "IntervalBox",
    "as_bounds",
    "classical_moments",
    "symbolic_mean",
    "symbolic_variance",
    "symbolic_covariance",
    "symbolic_covariance_matrix",
    "uniform_interval_variance",
    "pearson_inequality_holds",
]

