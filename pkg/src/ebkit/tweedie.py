"""Posterior cumulants via Tweedie's formula.

For an exponential family ``g_theta(x) = exp(theta*x - K(theta)) g0(x)`` the
posterior mean of ``theta`` is ``l'(x) - l0'(x)`` where ``l = log g_X`` is the
log marginal and ``l0 = log g0``. The marginal log-derivative comes from a
fitted Pearson system; the carrier term is family specific.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from statistics import NormalDist

import numpy as np

from .errors import BadLevel, BoundaryX, DimensionMismatch, NonPDSigma, NonPositiveU
from .pearson import PearsonFit, density_at, fit_sample, score, score_derivative

_STD_NORMAL = NormalDist()


@dataclass
class PosteriorEstimate:
    """First two posterior cumulants at one observation."""

    post_mean: float | np.ndarray
    post_var: float | np.ndarray
    x: float | np.ndarray
    model: str
    n_clamped: int = 0


def _clamp_nonneg(v):
    arr = np.asarray(v, dtype=float)
    neg = arr < 0
    n = int(np.count_nonzero(neg))
    if n:
        arr = np.where(neg, 0.0, arr)
    return (float(arr) if arr.ndim == 0 else arr), n


def normal_posterior_mean(z, sigma2: float, fit: PearsonFit):
    """``E[mu|z] = z + sigma2 * g'(z)/g(z)`` for ``z|mu ~ N(mu, sigma2)``."""
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    out = np.asarray(z, dtype=float) + sigma2 * np.asarray(score(fit, z))
    return float(out) if out.ndim == 0 else out


def normal_posterior_var(z, sigma2: float, fit: PearsonFit, return_clamped: bool = False):
    """``Var[mu|z] = sigma2 + sigma2**2 * (g'/g)'(z)``, clamped at zero."""
    if not sigma2 > 0:
        raise ValueError("sigma2 must be positive")
    raw = sigma2 + sigma2 * sigma2 * np.asarray(score_derivative(fit, z))
    v, n = _clamp_nonneg(raw)
    return (v, n) if return_clamped else v


def normal_variance_posterior(u, nu: int, h_fit: PearsonFit):
    """Posterior mean of a group variance given its sample variance ``u``.

    ``E[sigma^2|u] = u(1 + 2/nu) + (2/nu) u^2 h'(u)/h(u)`` where ``h`` is the
    marginal density of sample variances, here a Pearson fit to ``{u_i}``.

    The formula is first order in ``1/nu``. With heavy-tailed variance
    priors a moment-fitted ``h`` can place its support boundary inside the
    observed ``u`` range, and estimates near that boundary are unreliable.
    """
    u_arr = np.asarray(u, dtype=float)
    if np.any(u_arr <= 0):
        raise NonPositiveU("sample variances must be positive")
    if nu < 1:
        raise ValueError("nu must be >= 1")
    s = np.asarray(score(h_fit, u_arr))
    out = u_arr * (1.0 + 2.0 / nu) + (2.0 / nu) * u_arr * u_arr * s
    return float(out) if out.ndim == 0 else out


def variance_correction(u, nu: int, score_value):
    """Same formula as :func:`normal_variance_posterior` with a supplied score."""
    u = np.asarray(u, dtype=float)
    out = u * (1.0 + 2.0 / nu) + (2.0 / nu) * u * u * np.asarray(score_value, dtype=float)
    return float(out) if out.ndim == 0 else out


def binomial_log_carrier_deriv(x: float, n: int) -> tuple[float, float]:
    """First two derivatives of ``log(C(n, x) / 2**n)`` under Stirling.

    ``l0'(x) = log((n-x)/x) + (2x-n)/(2x(n-x))`` and
    ``l0''(x) = -n/(x(n-x)) + (n^2 - 2nx + 2x^2)/(2 x^2 (n-x)^2)``.
    """
    x = float(x)
    if not (0.0 < x < n):
        raise BoundaryX(f"need 0 < x < n, got x={x}, n={n}")
    y = n - x
    l0p = math.log(y / x) + (x - y) / (2.0 * x * y)
    l0pp = -n / (x * y) + (x * x + y * y) / (2.0 * x * x * y * y)
    return l0p, l0pp


def logistic(t):
    t = np.asarray(t, dtype=float)
    out = np.where(t >= 0, 1.0 / (1.0 + np.exp(-np.abs(t))), np.exp(-np.abs(t)) / (1.0 + np.exp(-np.abs(t))))
    return float(out) if out.ndim == 0 else out


def binomial_posterior(x: float, n: int, fit: PearsonFit) -> tuple[float, float]:
    """Posterior log-odds mean and the implied success probability.

    Returns ``(theta_mean, p_mean)`` with ``theta_mean = g'/g(x) - l0'(x)`` and
    ``p_mean = logistic(theta_mean)``.
    """
    l0p, _ = binomial_log_carrier_deriv(x, n)
    theta = score(fit, x) - l0p
    return theta, logistic(theta)


def binomial_posterior_var(x: float, n: int, fit: PearsonFit) -> float:
    """``Var[theta|x] = (g'/g)'(x) - l0''(x)``, clamped at zero."""
    _, l0pp = binomial_log_carrier_deriv(x, n)
    return max(0.0, score_derivative(fit, x) - l0pp)


def multinomial_log_carrier_grad(x, n: float) -> np.ndarray:
    """Gradient of the Stirling-approximated multinomial log carrier.

    ``x`` holds k cell counts; only the first ``k-1`` are free, the last cell
    is ``n - sum(x[:-1])``. Returns the ``k-1`` partial derivatives.
    """
    x = np.asarray(x, dtype=float).ravel()
    if x.size < 2:
        raise DimensionMismatch("need at least two cells")
    free = x[:-1]
    rest = n - free.sum()
    if np.any(free <= 0) or not rest > 0:
        raise BoundaryX("need every free count > 0 and sum of free counts < n")
    return np.log(rest / free) + (free - rest) / (2.0 * free * rest)


def _check_spd(Sigma: np.ndarray) -> np.ndarray:
    S = np.asarray(Sigma, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise NonPDSigma("Sigma must be square")
    if not np.allclose(S, S.T, rtol=1e-10, atol=1e-12):
        raise NonPDSigma("Sigma must be symmetric")
    try:
        np.linalg.cholesky(S)
    except np.linalg.LinAlgError as exc:
        raise NonPDSigma("Sigma is not positive definite") from exc
    return S


def mvn_posterior(x, Sigma, scores, score_derivs) -> PosteriorEstimate:
    """Multivariate normal Tweedie posterior with a diagonal ``l''``.

    ``E[mu|x] = x + Sigma l'(x)``, ``Var[mu|x] = Sigma + Sigma diag(l'') Sigma``.
    """
    S = _check_spd(Sigma)
    x = np.asarray(x, dtype=float).ravel()
    s = np.asarray(scores, dtype=float).ravel()
    d = np.asarray(score_derivs, dtype=float).ravel()
    p = S.shape[0]
    if not (x.size == s.size == d.size == p):
        raise DimensionMismatch(f"x, scores, score_derivs must have length {p}")
    mean = x + S @ s
    var = S + S @ (d[:, None] * S)
    var = (var + var.T) / 2.0
    return PosteriorEstimate(post_mean=mean, post_var=var, x=x, model="mvn")


def poisson_posterior_transform(score_diff):
    """``E[theta|x] = exp(E[log theta|x])`` as stated for the Poisson model.

    Note this is ``exp`` of a posterior mean of ``log theta``, which by
    Jensen's inequality underestimates the posterior mean of ``theta``.
    """
    out = np.exp(np.asarray(score_diff, dtype=float))
    return float(out) if out.ndim == 0 else out


def normal_quantile(p: float) -> float:
    """Inverse standard normal CDF."""
    if not 0.0 < p < 1.0:
        raise BadLevel(f"probability must be in (0, 1), got {p}")
    return _STD_NORMAL.inv_cdf(p)


def credible_interval(post_mean, post_var, level: float = 0.95):
    """Normal-approximation credible interval ``mean -/+ z * sqrt(var)``."""
    if not 0.0 < level < 1.0:
        raise BadLevel(f"level must be in (0, 1), got {level}")
    var = np.asarray(post_var, dtype=float)
    if np.any(var < 0):
        raise ValueError("post_var must be non-negative")
    q = normal_quantile((1.0 + level) / 2.0)
    half = q * np.sqrt(var)
    mean = np.asarray(post_mean, dtype=float)
    lo, hi = mean - half, mean + half
    if lo.ndim == 0:
        return float(lo), float(hi)
    return lo, hi


def default_fdr_grid(z) -> tuple[float, float, int]:
    z = np.asarray(z, dtype=float)
    lo = min(float(np.min(z)), -8.0) - 2.0
    hi = max(float(np.max(z)), 8.0) + 2.0
    return lo, hi, 8001


def local_fdr(z, fit: PearsonFit, pi0: float = 1.0, grid: tuple[float, float, int] | None = None):
    """Local false discovery rate ``pi0 * phi(z) / f(z)`` clamped to [0, 1].

    ``f`` is the Pearson density reconstructed on ``grid = (lo, hi, n)``.
    """
    if not 0.0 < pi0 <= 1.0:
        raise ValueError("pi0 must be in (0, 1]")
    z_arr = np.asarray(z, dtype=float)
    lo, hi, n = grid if grid is not None else default_fdr_grid(z_arr)
    f = density_at(fit, z_arr, lo, hi, n)
    phi = np.exp(-0.5 * z_arr * z_arr) / math.sqrt(2.0 * math.pi)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(f > 0, pi0 * phi / f, 1.0)
    out = np.clip(ratio, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


@dataclass
class NormalTweedieTable:
    """Per-observation normal-model posterior summary."""

    z: np.ndarray
    post_mean: np.ndarray
    post_var: np.ndarray
    ci_lo: np.ndarray
    ci_hi: np.ndarray
    fdr: np.ndarray
    fit: PearsonFit
    sigma2: float
    level: float
    pi0: float
    n_clamped: int = 0
    columns: tuple = field(default=("z", "post_mean", "post_var", "ci_lo", "ci_hi", "fdr"), repr=False)

    def rows(self):
        for vals in zip(self.z, self.post_mean, self.post_var, self.ci_lo, self.ci_hi, self.fdr):
            yield tuple(float(v) for v in vals)


def normal_tweedie(z, sigma2: float = 1.0, fit: PearsonFit | None = None, level: float = 0.95,
                   pi0: float = 1.0) -> NormalTweedieTable:
    """Full normal-model pipeline over a vector of z-values.

    Fits the Pearson marginal from ``z`` unless ``fit`` is supplied.
    """
    z = np.asarray(z, dtype=float).ravel()
    if fit is None:
        fit = fit_sample(z)
    mean = normal_posterior_mean(z, sigma2, fit)
    var, n_clamped = normal_posterior_var(z, sigma2, fit, return_clamped=True)
    lo, hi = credible_interval(mean, var, level)
    fdr = local_fdr(z, fit, pi0)
    return NormalTweedieTable(
        z=z, post_mean=np.atleast_1d(mean), post_var=np.atleast_1d(var),
        ci_lo=np.atleast_1d(lo), ci_hi=np.atleast_1d(hi), fdr=np.atleast_1d(fdr),
        fit=fit, sigma2=sigma2, level=level, pi0=pi0, n_clamped=n_clamped,
    )


__all__ = [
    "PosteriorEstimate",
    "NormalTweedieTable",
    "normal_posterior_mean",
    "normal_posterior_var",
    "normal_variance_posterior",
    "variance_correction",
    "binomial_log_carrier_deriv",
    "binomial_posterior",
    "binomial_posterior_var",
    "multinomial_log_carrier_grad",
    "mvn_posterior",
    "poisson_posterior_transform",
    "logistic",
    "normal_quantile",
    "credible_interval",
    "local_fdr",
    "normal_tweedie",
]
