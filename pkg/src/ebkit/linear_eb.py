"""Robbins-style linear empirical Bayes shrinkage of group means.

Each group mean is pulled toward the grand mean by a matrix factor

    B_i = P [P + S^2 / n_i]^{-1},   P = (U^2 - v S^2)^+

where ``U^2`` is the between-group covariance of group means, ``S^2`` the
average within-group covariance, ``v`` the mean of ``1/n_i``, and ``^+``
clamps the diagonal of ``P`` at zero while keeping its off-diagonal entries.
The interval variants use symbolic means and variances in place of the
classical ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, EmptySample, SingularShrinkageMatrix, TooFewGroups
from .moments import as_bounds, symbolic_covariance_matrix

COND_MAX = 1e12


@dataclass
class GroupedSample:
    """N groups of p-dimensional observations (group sizes may differ)."""

    groups: list[np.ndarray]
    labels: list | None = None

    def __post_init__(self):
        gs = []
        for g in self.groups:
            arr = np.asarray(g, dtype=float)
            if arr.ndim == 1:
                arr = arr[:, None]
            if arr.ndim != 2 or arr.shape[0] == 0:
                raise EmptySample("every group needs at least one observation")
            gs.append(arr)
        if len(gs) < 2:
            raise TooFewGroups(f"need at least 2 groups, got {len(gs)}")
        p = gs[0].shape[1]
        if any(g.shape[1] != p for g in gs):
            raise DimensionMismatch("all groups must share the dimension p")
        self.groups = gs
        if self.labels is None:
            self.labels = list(range(len(gs)))

    @classmethod
    def from_long(cls, labels: Sequence, X) -> "GroupedSample":
        """Build from a label per row; group order follows first appearance."""
        X = np.asarray(X, dtype=float)
        if X.ndim == 1:
            X = X[:, None]
        order: dict = {}
        for i, lab in enumerate(labels):
            order.setdefault(lab, []).append(i)
        return cls([X[idx] for idx in order.values()], labels=list(order))

    @property
    def N(self) -> int:
        return len(self.groups)

    @property
    def p(self) -> int:
        return self.groups[0].shape[1]

    @property
    def sizes(self) -> np.ndarray:
        return np.array([g.shape[0] for g in self.groups])

    def shifted(self, c) -> "GroupedSample":
        c = np.asarray(c, dtype=float)
        return GroupedSample([g + c for g in self.groups], labels=self.labels)


@dataclass
class EbSummary:
    group_means: np.ndarray  # (N, p)
    grand_mean: np.ndarray  # (p,)
    S2: np.ndarray  # (p, p)
    U2: np.ndarray  # (p, p)
    v: float
    sizes: np.ndarray
    n_singletons: int = 0

    @property
    def plus_part(self) -> np.ndarray:
        return plus_part(self.U2 - self.v * self.S2)


def plus_part(M: np.ndarray) -> np.ndarray:
    """Clamp the diagonal at zero; off-diagonal entries are kept."""
    P = np.array(M, dtype=float, copy=True)
    d = np.diag_indices_from(P)
    P[d] = np.maximum(P[d], 0.0)
    return P


def _between(means: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    grand = means.mean(axis=0)
    dev = means - grand
    return grand, dev.T @ dev / (means.shape[0] - 1)


def summarize(data: GroupedSample) -> EbSummary:
    """Group means, grand mean, pooled within and between covariances.

    Within-group covariances use denominator ``n_i - 1`` and are averaged over
    the groups with ``n_i >= 2``; singleton groups are counted but contribute
    no within-group information.
    """
    if not isinstance(data, GroupedSample):
        data = GroupedSample(list(data))
    means = np.array([g.mean(axis=0) for g in data.groups])
    grand, U2 = _between(means)
    within = [np.atleast_2d(np.cov(g, rowvar=False, ddof=1)) for g in data.groups if g.shape[0] >= 2]
    p = data.p
    S2 = np.mean(within, axis=0) if within else np.zeros((p, p))
    sizes = data.sizes
    return EbSummary(
        group_means=means, grand_mean=grand, S2=S2, U2=U2,
        v=float(np.mean(1.0 / sizes)), sizes=sizes,
        n_singletons=int(np.count_nonzero(sizes < 2)),
    )


def shrinkage_matrices(summary: EbSummary, ridge: float = 0.0, cond_max: float = COND_MAX) -> list[np.ndarray]:
    """Per-group shrinkage matrix ``B_i = P (P + S^2/n_i)^{-1}``."""
    P = summary.plus_part
    p = P.shape[0]
    out = []
    for i, n_i in enumerate(summary.sizes):
        M = P + summary.S2 / n_i
        if ridge:
            M = M + ridge * np.eye(p)
        if not np.any(P):
            # zero plus-part: complete shrinkage regardless of M
            out.append(np.zeros((p, p)))
            continue
        cond = np.linalg.cond(M)
        if not np.isfinite(cond) or cond > cond_max:
            raise SingularShrinkageMatrix(i, float(cond))
        out.append(np.linalg.solve(M.T, P.T).T)
    return out


def _apply(summary: EbSummary, B: list[np.ndarray]) -> np.ndarray:
    dev = summary.group_means - summary.grand_mean
    return np.array([summary.grand_mean + Bi @ d for Bi, d in zip(B, dev)])


def estimate(data: GroupedSample, ridge: float = 0.0) -> np.ndarray:
    """Linear EB estimates of the group means, shape (N, p).

    Raises:
        SingularShrinkageMatrix: ``P + S^2/n_i`` too ill-conditioned for some
            group; pass ``ridge > 0`` to regularize.
    """
    summary = summarize(data)
    return _apply(summary, shrinkage_matrices(summary, ridge=ridge))


def affine_rule(center_a: float, est_a: float, center_b: float, est_b: float) -> tuple[float, float]:
    """Recover ``(a, b)`` of ``t = a + b*c`` from two (center, estimate) pairs."""
    if center_a == center_b:
        raise ValueError("need two distinct centers")
    b = (est_a - est_b) / (center_a - center_b)
    return est_a - b * center_a, b


@dataclass
class IntervalGroupedSample:
    """Groups of interval observations; each group holds (lower, upper) arrays of shape (n_i, p)."""

    lower: list[np.ndarray]
    upper: list[np.ndarray]
    labels: list | None = None

    def __post_init__(self):
        los, his = [], []
        for lo, hi in zip(self.lower, self.upper):
            lo, hi = as_bounds((np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)))
            if lo.shape[0] == 0:
                raise EmptySample("every group needs at least one interval")
            los.append(lo)
            his.append(hi)
        if len(los) != len(self.lower) or len(self.lower) != len(self.upper):
            raise DimensionMismatch("lower/upper group lists differ in length")
        if len(los) < 2:
            raise TooFewGroups(f"need at least 2 groups, got {len(los)}")
        p = los[0].shape[1]
        if any(lo.shape[1] != p for lo in los):
            raise DimensionMismatch("all groups must share the dimension p")
        self.lower, self.upper = los, his
        if self.labels is None:
            self.labels = list(range(len(los)))

    @classmethod
    def from_groups(cls, groups: Sequence, labels=None) -> "IntervalGroupedSample":
        """Each group is anything :func:`ebkit.moments.as_bounds` accepts."""
        pairs = [as_bounds(g) for g in groups]
        return cls([p[0] for p in pairs], [p[1] for p in pairs], labels=labels)

    @classmethod
    def singletons(cls, intervals) -> "IntervalGroupedSample":
        """One interval per group."""
        lo, hi = as_bounds(intervals)
        return cls([lo[i:i + 1] for i in range(lo.shape[0])], [hi[i:i + 1] for i in range(hi.shape[0])])

    @classmethod
    def from_long(cls, labels: Sequence, lower, upper) -> "IntervalGroupedSample":
        lower = np.asarray(lower, dtype=float)
        upper = np.asarray(upper, dtype=float)
        if lower.ndim == 1:
            lower, upper = lower[:, None], upper[:, None]
        order: dict = {}
        for i, lab in enumerate(labels):
            order.setdefault(lab, []).append(i)
        idx = list(order.values())
        return cls([lower[i] for i in idx], [upper[i] for i in idx], labels=list(order))

    @property
    def N(self) -> int:
        return len(self.lower)

    @property
    def p(self) -> int:
        return self.lower[0].shape[1]

    @property
    def sizes(self) -> np.ndarray:
        return np.array([lo.shape[0] for lo in self.lower])

    def shifted(self, c) -> "IntervalGroupedSample":
        c = np.asarray(c, dtype=float)
        return IntervalGroupedSample([lo + c for lo in self.lower], [hi + c for hi in self.upper], self.labels)


def summarize_interval(data: IntervalGroupedSample) -> EbSummary:
    """Symbolic analogue of :func:`summarize`.

    Group means are means of centers; each group's within covariance is the
    symbolic covariance matrix (denominator ``n_i``), so a single interval
    contributes its uniform variance ``(u - l)^2 / 12`` on the diagonal.
    """
    means = np.array([((lo + hi) / 2.0).mean(axis=0) for lo, hi in zip(data.lower, data.upper)])
    grand, U2 = _between(means)
    S2 = np.mean([symbolic_covariance_matrix(lo, hi) for lo, hi in zip(data.lower, data.upper)], axis=0)
    sizes = data.sizes
    return EbSummary(
        group_means=means, grand_mean=grand, S2=S2, U2=U2,
        v=float(np.mean(1.0 / sizes)), sizes=sizes,
        n_singletons=int(np.count_nonzero(sizes < 2)),
    )


def interval_shrinkage_factors(data: IntervalGroupedSample) -> tuple[EbSummary, np.ndarray]:
    """Scalar factors ``b_i = P / (P + s^2/n_i)`` with ``P = max(0, u^2 - v s^2)``."""
    if data.p != 1:
        raise DimensionMismatch("scalar interval EB needs p = 1")
    summary = summarize_interval(data)
    u2 = float(summary.U2[0, 0])
    s2 = float(summary.S2[0, 0])
    P = max(0.0, u2 - summary.v * s2)
    if P == 0.0:
        return summary, np.zeros(data.N)
    return summary, P / (P + s2 / summary.sizes)


def estimate_interval_scalar(data: IntervalGroupedSample) -> np.ndarray:
    """EB estimates ``a_i + b_i * xbar_i`` of scalar interval group means."""
    summary, b = interval_shrinkage_factors(data)
    xbar = float(summary.grand_mean[0])
    a = xbar - b * xbar
    return a + b * summary.group_means[:, 0]


def estimate_interval_vector(data: IntervalGroupedSample, ridge: float = 0.0) -> np.ndarray:
    """EB estimates ``a + B_i xbar_i`` of vector interval group means, shape (N, p)."""
    summary = summarize_interval(data)
    return _apply(summary, shrinkage_matrices(summary, ridge=ridge))


def rank_estimates(estimates, descending: bool = False) -> np.ndarray:
    """Rank (1 = first) the rows of a one-column estimate array; ties by index."""
    e = np.asarray(estimates, dtype=float).ravel()
    key = -e if descending else e
    order = np.lexsort((np.arange(e.size), key))
    ranks = np.empty(e.size, dtype=int)
    ranks[order] = np.arange(1, e.size + 1)
    return ranks


__all__ = [
    "GroupedSample",
    "IntervalGroupedSample",
    "EbSummary",
    "plus_part",
    "summarize",
    "summarize_interval",
    "shrinkage_matrices",
    "estimate",
    "affine_rule",
    "interval_shrinkage_factors",
    "estimate_interval_scalar",
    "estimate_interval_vector",
    "rank_estimates",
]
