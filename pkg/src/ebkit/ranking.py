"""Empirical Bayes for ranking data.

A ranking ``R`` of ``t`` objects is mapped to the zero-sum unit vector

    x = (R - (t+1)/2) / sqrt(t(t^2-1)/12)

and the posterior mean of the location parameter is obtained from Tweedie's
formula with one of three carrying densities: uniform over permutations
(posterior = marginal score), von Mises-Fisher (score minus ``kappa*m``) or
multivariate normal (``x + Sigma @ score``). The marginal score is built from
one Pearson fit per coordinate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadOrder, DimensionMismatch, NotAPermutation, ZeroResultant
from .pearson import PearsonFit, fit_sample, score
from .tweedie import _check_spd

R_CLIP = 1.0 - 1e-9
BESSEL_SWITCH = 30.0
SERIES_TOL = 1e-12
CARRIERS = ("uniform", "vmf", "normal")


def validate_ranking(r) -> np.ndarray:
    r = np.asarray(r)
    if r.ndim != 1 or r.size < 2:
        raise NotAPermutation("a ranking needs at least 2 entries")
    if not np.all(np.equal(np.mod(r, 1), 0)):
        raise NotAPermutation(f"non-integer ranks in {r.tolist()}")
    ri = r.astype(int)
    if not np.array_equal(np.sort(ri), np.arange(1, ri.size + 1)):
        raise NotAPermutation(f"{ri.tolist()} is not a permutation of 1..{ri.size} (ties are not supported)")
    return ri


def standardize_ranking(r) -> np.ndarray:
    """Zero-sum, unit-norm image of a ranking."""
    ri = validate_ranking(r)
    t = ri.size
    return (ri - (t + 1) / 2.0) / math.sqrt(t * (t * t - 1) / 12.0)


def standardize_rankings(R) -> np.ndarray:
    """Row-wise :func:`standardize_ranking` of an (N, t) array."""
    R = np.atleast_2d(np.asarray(R))
    return np.array([standardize_ranking(row) for row in R])


@dataclass(frozen=True)
class VmfParams:
    m: np.ndarray
    kappa: float
    r: float
    null_m: bool = False


def vmf_mle(xs, allow_zero: bool = False, zero_tol: float = 1e-12) -> VmfParams:
    """Maximum likelihood consensus direction and concentration.

    ``m = sum(x)/||sum(x)||``, ``r = ||sum(x)||/N`` and
    ``kappa = r(t-1-r^2)/(1-r^2)`` with ``r`` clipped below 1.

    Raises:
        ZeroResultant: ``||sum(x)|| == 0`` unless ``allow_zero``, in which
            case ``kappa = 0`` and ``m`` is the zero vector with ``null_m``.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    N, t = xs.shape
    if N < 1:
        raise ValueError("need at least one ranking")
    s = xs.sum(axis=0)
    norm = float(np.linalg.norm(s))
    if norm <= zero_tol * N:
        if allow_zero:
            return VmfParams(m=np.zeros(t), kappa=0.0, r=0.0, null_m=True)
        raise ZeroResultant("rankings are perfectly balanced; consensus direction undefined")
    r = min(norm / N, R_CLIP)
    kappa = r * (t - 1 - r * r) / (1.0 - r * r)
    return VmfParams(m=s / norm, kappa=float(kappa), r=float(r))


def _log_bessel_series(nu: float, z: float) -> float:
    # ascending series sum_k (z/2)^(2k+nu) / (k! Gamma(k+nu+1)), summed relative to its first term
    log_first = nu * math.log(z / 2.0) - math.lgamma(nu + 1.0)
    q = z * z / 4.0
    term, total, k = 1.0, 1.0, 0
    while True:
        k += 1
        term *= q / (k * (k + nu))
        total += term
        # remaining terms are bounded by a geometric series once the ratio drops below 1
        ratio = q / ((k + 1) * (k + 1 + nu))
        if ratio < 1.0 and term / (1.0 - ratio) <= SERIES_TOL * total:
            break
        if k > 10000:
            break
    return log_first + math.log(total)


def _log_bessel_asymptotic(nu: float, z: float) -> float:
    # I_nu(z) ~ e^z / sqrt(2 pi z) * sum_k (-1)^k a_k(nu) / z^k
    mu = 4.0 * nu * nu
    term, total = 1.0, 1.0
    prev = math.inf
    for k in range(1, 60):
        term *= -(mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        if abs(term) >= prev:
            break
        total += term
        prev = abs(term)
        if abs(term) <= 1e-17 * abs(total):
            break
    return z - 0.5 * math.log(2.0 * math.pi * z) + math.log(total)


def log_bessel_iv(nu: float, z: float) -> float:
    """``log I_nu(z)`` for ``nu >= 0``, ``z > 0``.

    Power series for ``z <= 30``, asymptotic expansion above.
    """
    if z <= 0:
        raise ValueError("z must be positive")
    if nu < 0:
        raise ValueError("nu must be non-negative")
    if z <= BESSEL_SWITCH:
        return _log_bessel_series(nu, z)
    return _log_bessel_asymptotic(nu, z)


def bessel_iv(nu: float, z: float) -> float:
    """Modified Bessel function of the first kind ``I_nu(z)``."""
    if z == 0:
        return 1.0 if nu == 0 else 0.0
    return math.exp(log_bessel_iv(nu, z))


def log_vmf_norm_constant(t: int, kappa: float) -> float:
    if t < 3:
        raise BadOrder(f"t must be >= 3, got {t}")
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    nu = (t - 3) / 2.0
    return (nu * math.log(kappa) - nu * math.log(2.0) - math.lgamma(t + 1.0)
            - log_bessel_iv(nu, kappa) - math.lgamma((t - 1) / 2.0))


def vmf_norm_constant(t: int, kappa: float) -> float:
    """Sphere-integral approximation of the vMF normalizer over permutations.

    ``C_t(kappa) = kappa^nu / (2^nu t! I_nu(kappa) Gamma((t-1)/2))`` with
    ``nu = (t-3)/2``.
    """
    return math.exp(log_vmf_norm_constant(t, kappa))


def column_fits(xs) -> list[PearsonFit]:
    """One Pearson fit per coordinate of an (N, t) array."""
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    return [fit_sample(xs[:, j]) for j in range(xs.shape[1])]


def marginal_scores(xs, fits: Sequence[PearsonFit]) -> np.ndarray:
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if len(fits) != xs.shape[1]:
        raise DimensionMismatch(f"{len(fits)} fits for {xs.shape[1]} coordinates")
    return np.column_stack([np.atleast_1d(score(f, xs[:, j])) for j, f in enumerate(fits)])


def rank_posterior(xs, carrier: str = "uniform", fits: Sequence[PearsonFit] | None = None,
                   Sigma=None, vmf: VmfParams | None = None) -> np.ndarray:
    """Posterior mean vector for every standardized ranking.

    Args:
        xs: (N, t) standardized rankings.
        carrier: ``uniform``, ``vmf`` or ``normal``.
        fits: per-coordinate Pearson fits; fitted from ``xs`` when omitted.
        Sigma: covariance for the normal carrier; ``None`` uses the sample
            covariance of ``xs``, the string ``"identity"`` uses ``I``.
        vmf: parameters for the vMF carrier; estimated from ``xs`` when
            omitted (a zero resultant then gives ``kappa = 0``).

    Returns:
        (N, t) array of posterior means.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    N, t = xs.shape
    if carrier not in CARRIERS:
        raise ValueError(f"unknown carrier {carrier!r}; choose one of {CARRIERS}")
    if fits is None:
        fits = column_fits(xs)
    s = marginal_scores(xs, fits)
    if carrier == "uniform":
        return s
    if carrier == "vmf":
        if vmf is None:
            vmf = vmf_mle(xs, allow_zero=True)
        if vmf.m.shape != (t,):
            raise DimensionMismatch("vMF direction has the wrong length")
        if vmf.kappa == 0.0:
            return s
        return s - vmf.kappa * vmf.m
    if Sigma is None:
        S = np.cov(xs, rowvar=False, ddof=1)
    elif isinstance(Sigma, str) and Sigma == "identity":
        S = np.eye(t)
    else:
        S = np.asarray(Sigma, dtype=float)
        if S.shape != (t, t):
            raise DimensionMismatch(f"Sigma must be {t}x{t}")
        _check_spd(S)
    return xs + s @ S.T


def consensus_ranking(posteriors) -> np.ndarray:
    """Rank objects by averaged posterior, largest first (rank 1).

    Ties in the average go to the lower object index.
    """
    P = np.atleast_2d(np.asarray(posteriors, dtype=float))
    avg = P.mean(axis=0)
    order = np.lexsort((np.arange(avg.size), -avg))
    ranks = np.empty(avg.size, dtype=int)
    ranks[order] = np.arange(1, avg.size + 1)
    return ranks


def group_consensus(xs, groups, carrier: str = "uniform", Sigma=None, per_group_fits: bool = True) -> dict:
    """Consensus ranking per group label.

    With ``per_group_fits`` the Pearson fits (and vMF/normal parameters) are
    estimated within each group, otherwise from all rankings.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    labels = np.asarray(groups)
    if labels.shape[0] != xs.shape[0]:
        raise DimensionMismatch("one group label per ranking required")
    out = {}
    if not per_group_fits:
        post = rank_posterior(xs, carrier, Sigma=Sigma)
    for g in dict.fromkeys(labels.tolist()):
        mask = labels == g
        p = rank_posterior(xs[mask], carrier, Sigma=Sigma) if per_group_fits else post[mask]
        out[g] = consensus_ranking(p)
    return out


__all__ = [
    "validate_ranking",
    "standardize_ranking",
    "standardize_rankings",
    "VmfParams",
    "vmf_mle",
    "bessel_iv",
    "log_bessel_iv",
    "vmf_norm_constant",
    "log_vmf_norm_constant",
    "column_fits",
    "marginal_scores",
    "rank_posterior",
    "consensus_ranking",
    "group_consensus",
]
