"""Dynamic clustering (DCA) of interval-valued objects.

Objects are ``n`` interval vectors stored as ``(lower, upper)`` arrays of
shape (n, p). The algorithm alternates an allocation stage (each object goes
to the prototype with the smallest summed per-dimension distance) and a
representative stage (each prototype becomes the componentwise mean interval
of its members) until no object moves.

Initial prototypes are ``K`` distinct objects drawn with
``numpy.random.default_rng(seed).choice(n, K, replace=False)`` (PCG64), so a
run is reproducible across platforms for a given numpy major version.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BadK, DegenerateRange, InconsistentPartition, ZeroDispersion
from .moments import as_bounds


class DistanceKind(str, Enum):
    L2 = "l2"
    HAUSDORFF = "hausdorff"
    WASSERSTEIN = "wasserstein"

    @classmethod
    def parse(cls, kind) -> "DistanceKind":
        if isinstance(kind, cls):
            return kind
        try:
            return cls(str(kind).lower())
        except ValueError:
            raise ValueError(f"unknown distance {kind!r}; choose l2, hausdorff or wasserstein") from None


def _dist_cr(kind: DistanceKind, dc, dr, squared: bool = False):
    """Distance from center and half-width differences (broadcasting)."""
    dc = np.abs(dc)
    dr = np.abs(dr)
    if kind is DistanceKind.L2:
        sq = 2.0 * dc * dc + 2.0 * dr * dr
    elif kind is DistanceKind.WASSERSTEIN:
        sq = dc * dc + dr * dr / 3.0
    else:
        h = dc + dr
        return h * h if squared else h
    return sq if squared else np.sqrt(sq)


def interval_distance(kind, x, y, squared: bool = False) -> float:
    """Distance between two scalar intervals ``x = (l, u)`` and ``y``.

    * ``l2``: ``sqrt((l1-l2)^2 + (u1-u2)^2)``
    * ``hausdorff``: ``max(|l1-l2|, |u1-u2|)``
    * ``wasserstein``: ``sqrt((c1-c2)^2 + (r1-r2)^2/3)``, the L2 distance
      between the quantile functions of the uniform distributions.
    """
    kind = DistanceKind.parse(kind)
    (l1, u1), (l2, u2) = x, y
    if l1 > u1 or l2 > u2:
        raise ValueError("invalid interval")
    dc = (l1 + u1) / 2.0 - (l2 + u2) / 2.0
    dr = (u1 - l1) / 2.0 - (u2 - l2) / 2.0
    return float(_dist_cr(kind, dc, dr, squared))


def pairwise_to_prototypes(lower, upper, plo, phi, kind, squared: bool = False) -> np.ndarray:
    """``D[i, k] = sum_j d(x_ij, proto_kj)``, shape (n, K)."""
    kind = DistanceKind.parse(kind)
    c, r = (lower + upper) / 2.0, (upper - lower) / 2.0
    pc, pr = (plo + phi) / 2.0, (phi - plo) / 2.0
    dc = c[:, None, :] - pc[None, :, :]
    dr = r[:, None, :] - pr[None, :, :]
    return _dist_cr(kind, dc, dr, squared).sum(axis=2)


def standardize(lower, upper, method: str = "centers") -> tuple[np.ndarray, np.ndarray]:
    """Standardize interval data dimension by dimension.

    * ``centers``: subtract the mean center, divide by the standard deviation
      (denominator n) of centers.
    * ``bounds``: subtract the mean center, divide by the square root of
      ``(1/n) sum((l - m)^2 + (u - m)^2) / 2``, the dispersion of the bounds.
    * ``range``: map ``[Min_j, Max_j]`` of all bounds onto ``[0, 1]``.
    * ``none``: return copies.

    Raises:
        ZeroDispersion: zero dispersion in some dimension (centers, bounds).
        DegenerateRange: ``Max_j == Min_j`` in some dimension (range).
    """
    lo, hi = as_bounds((np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)))
    if method == "none":
        return lo.copy(), hi.copy()
    if method == "range":
        mn, mx = lo.min(axis=0), hi.max(axis=0)
        span = mx - mn
        if np.any(span <= 0):
            raise DegenerateRange(f"Max == Min in dimension(s) {np.flatnonzero(span <= 0).tolist()}")
        return (lo - mn) / span, (hi - mn) / span
    m = ((lo + hi) / 2.0).mean(axis=0)
    if method == "centers":
        s = np.sqrt(np.mean(((lo + hi) / 2.0 - m) ** 2, axis=0))
    elif method == "bounds":
        s = np.sqrt(np.mean(((lo - m) ** 2 + (hi - m) ** 2) / 2.0, axis=0))
    else:
        raise ValueError(f"unknown standardization {method!r}")
    if np.any(s <= 0):
        raise ZeroDispersion(f"zero dispersion in dimension(s) {np.flatnonzero(s <= 0).tolist()}")
    return (lo - m) / s, (hi - m) / s


@dataclass
class Partition:
    assignments: np.ndarray
    proto_lower: np.ndarray
    proto_upper: np.ndarray
    criterion: float
    history: list[float] = field(default_factory=list)
    iterations: int = 0
    converged: bool = False
    seed: int | None = None

    @property
    def K(self) -> int:
        return self.proto_lower.shape[0]

    @property
    def prototypes(self) -> np.ndarray:
        """Prototypes as an array of shape (K, p, 2)."""
        return np.stack([self.proto_lower, self.proto_upper], axis=-1)

    def clusters(self) -> list[list[int]]:
        return [np.flatnonzero(self.assignments == k).tolist() for k in range(self.K)]

    def report(self) -> dict:
        return {
            "seed": self.seed,
            "K": self.K,
            "iterations": self.iterations,
            "converged": self.converged,
            "criterion": self.criterion,
            "history": list(self.history),
            "sizes": np.bincount(self.assignments, minlength=self.K).tolist(),
        }


def prototypes_of(lower, upper, assignments, K: int) -> tuple[np.ndarray, np.ndarray]:
    """Componentwise mean interval of each cluster (NaN rows for empty clusters)."""
    p = lower.shape[1]
    plo = np.full((K, p), np.nan)
    phi = np.full((K, p), np.nan)
    for k in range(K):
        mask = assignments == k
        if mask.any():
            plo[k] = lower[mask].mean(axis=0)
            phi[k] = upper[mask].mean(axis=0)
    return plo, phi


def criterion(lower, upper, assignments, proto_lower, proto_upper, kind, squared: bool = False) -> float:
    """``W = sum_h sum_{x in C_h} sum_j d(x_j, l_hj)``."""
    lower, upper = as_bounds((np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)))
    a = np.asarray(assignments)
    plo = np.atleast_2d(np.asarray(proto_lower, dtype=float))
    phi = np.atleast_2d(np.asarray(proto_upper, dtype=float))
    if a.shape != (lower.shape[0],) or plo.shape != phi.shape or plo.shape[1] != lower.shape[1]:
        raise InconsistentPartition("assignment/prototype shapes do not match the data")
    if a.size and (a.min() < 0 or a.max() >= plo.shape[0]):
        raise InconsistentPartition("cluster index out of range")
    D = pairwise_to_prototypes(lower, upper, plo, phi, kind, squared)
    return float(D[np.arange(a.size), a].sum())


def partition_criterion(lower, upper, partition: Partition, kind, squared: bool = False) -> float:
    return criterion(lower, upper, partition.assignments, partition.proto_lower, partition.proto_upper,
                     kind, squared)


def _allocate(D: np.ndarray) -> np.ndarray:
    # np.argmin returns the first minimum: lowest cluster index wins ties
    return np.argmin(D, axis=1)


def _repair_empty(a: np.ndarray, D: np.ndarray, K: int) -> np.ndarray:
    a = a.copy()
    for k in range(K):
        counts = np.bincount(a, minlength=K)
        if counts[k]:
            continue
        own = D[np.arange(a.size), a]
        # only move objects whose cluster keeps at least one member
        own = np.where(counts[a] > 1, own, -np.inf)
        a[int(np.argmax(own))] = k
    return a


def dca(lower, upper, K: int, kind="l2", seed: int = 0, max_iter: int = 100,
        squared: bool = False, init=None) -> Partition:
    """Dynamic clustering of interval objects.

    Args:
        lower, upper: bounds of shape (n, p) (or (n,) for scalar intervals).
        K: number of clusters, ``1 <= K <= n``.
        kind: ``l2``, ``hausdorff`` or ``wasserstein``.
        seed: seed for choosing the ``K`` initial prototype objects.
        max_iter: maximum number of allocation/representative rounds.
        squared: use squared L2/Wasserstein (k-means-like) distances.
        init: optional explicit indices of the initial prototype objects.

    Returns:
        A :class:`Partition`; ``history[0]`` is W for the initial allocation
        and each later entry is W after a full round.
    """
    kind = DistanceKind.parse(kind)
    lower, upper = as_bounds((np.asarray(lower, dtype=float), np.asarray(upper, dtype=float)))
    n = lower.shape[0]
    if not isinstance(K, (int, np.integer)) or not 1 <= K <= n:
        raise BadK(f"K must be an integer in [1, {n}], got {K!r}")
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if init is None:
        init = np.random.default_rng(seed).choice(n, size=K, replace=False)
    init = np.asarray(init, dtype=int)
    if init.shape != (K,) or len(set(init.tolist())) != K:
        raise BadK("init must hold K distinct object indices")
    plo, phi = lower[init].copy(), upper[init].copy()

    D = pairwise_to_prototypes(lower, upper, plo, phi, kind, squared)
    a = _repair_empty(_allocate(D), D, K)
    plo, phi = prototypes_of(lower, upper, a, K)
    W = criterion(lower, upper, a, plo, phi, kind, squared)
    history = [W]
    converged = False
    it = 0
    for it in range(1, max_iter + 1):
        D = pairwise_to_prototypes(lower, upper, plo, phi, kind, squared)
        new = _repair_empty(_allocate(D), D, K)
        if np.array_equal(new, a):
            converged = True
            break
        a = new
        plo, phi = prototypes_of(lower, upper, a, K)
        W = criterion(lower, upper, a, plo, phi, kind, squared)
        history.append(W)
    return Partition(assignments=a, proto_lower=plo, proto_upper=phi, criterion=W, history=history,
                     iterations=it, converged=converged, seed=seed)


__all__ = [
    "DistanceKind",
    "interval_distance",
    "pairwise_to_prototypes",
    "standardize",
    "Partition",
    "prototypes_of",
    "criterion",
    "partition_criterion",
    "dca",
]
