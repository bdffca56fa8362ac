"""Pearson differential system fitted from four moments.

A Pearson density satisfies

    f'(x) / f(x) = (y - a) / (c0 + c1*y + c2*y**2),   y = x - mu1

with coefficients determined by variance, skewness and kurtosis. The
log-derivative (the *score*) is what Tweedie-type posterior means need, so
the density itself is only reconstructed numerically when required.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import cumulative_trapezoid, trapezoid

from .errors import DegenerateDenominator, PoleAtX, PoleInGrid, ZeroVariance
from .moments import MomentSummary, classical_moments

EPS_A = 1e-8
EPS_DEN = 1e-12


class MultimodalWarning(UserWarning):
    """The fitted score changes sign more than once on the evaluation grid."""


@dataclass(frozen=True)
class PearsonFit:
    """Coefficients of a fitted Pearson system.

    ``c1 == a`` always: both come from the same expression. Scores are
    evaluated relative to ``source.mu1``; fits built from standardized
    moments carry ``mu1 = 0``.
    """

    a: float
    c0: float
    c1: float
    c2: float
    A: float
    source: MomentSummary
    eps_den: float = EPS_DEN

    @property
    def loc(self) -> float:
        return self.source.mu1

    def denominator(self, x):
        y = np.asarray(x, dtype=float) - self.loc
        return self.c0 + self.c1 * y + self.c2 * y * y

    def to_dict(self) -> dict:
        return {
            "a": self.a,
            "c0": self.c0,
            "c1": self.c1,
            "c2": self.c2,
            "A": self.A,
            "moments": self.source.to_dict(),
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def fit_pearson(m: MomentSummary, eps_A: float = EPS_A, eps_den: float = EPS_DEN) -> PearsonFit:
    """Fit Pearson coefficients from a moment summary.

    Uses the standardized-moment parametrization with common denominator
    ``A = 10*beta2 - 12*beta1**2 - 18``.

    Raises:
        ZeroVariance: ``m.mu2 <= 0``.
        DegenerateDenominator: ``|A| <= eps_A`` (e.g. uniform data).
    """
    if m.zero_variance:
        raise ZeroVariance("cannot fit a Pearson system to a zero-variance sample")
    b1, b2 = m.beta1, m.beta2
    A = 10.0 * b2 - 12.0 * b1 * b1 - 18.0
    if not abs(A) > eps_A:
        raise DegenerateDenominator(f"|A| = {abs(A):.3g} <= {eps_A:g} (beta1={b1:g}, beta2={b2:g})")
    c0 = -m.mu2 * (4.0 * b2 - 3.0 * b1 * b1) / A
    a = -math.sqrt(m.mu2) * b1 * (b2 + 3.0) / A
    c2 = -(2.0 * b2 - 3.0 * b1 * b1 - 6.0) / A
    return PearsonFit(a=a, c0=c0, c1=a, c2=c2, A=A, source=m, eps_den=eps_den)


def fit_sample(sample, **kwargs) -> PearsonFit:
    """Shortcut: ``fit_pearson(classical_moments(sample))``."""
    return fit_pearson(classical_moments(sample), **kwargs)


def _checked_denominator(fit: PearsonFit, x):
    den = fit.denominator(x)
    bad = np.abs(den) <= fit.eps_den
    if np.any(bad):
        where = np.asarray(x, dtype=float)[bad] if np.ndim(x) else x
        raise PoleAtX(f"Pearson denominator vanishes at x={where}")
    return den


def score(fit: PearsonFit, x):
    """Log-density derivative ``g'(x)/g(x)`` of the fitted marginal."""
    den = _checked_denominator(fit, x)
    y = np.asarray(x, dtype=float) - fit.loc
    out = (y - fit.a) / den
    return float(out) if np.ndim(out) == 0 else out


def score_derivative(fit: PearsonFit, x):
    """Derivative of :func:`score` with respect to ``x``."""
    den = _checked_denominator(fit, x)
    y = np.asarray(x, dtype=float) - fit.loc
    a, c0, c1, c2 = fit.a, fit.c0, fit.c1, fit.c2
    out = -(c2 * y * y - 2.0 * a * c2 * y - (a * c1 + c0)) / (den * den)
    return float(out) if np.ndim(out) == 0 else out


def score_sign_changes(fit: PearsonFit, grid) -> int:
    s = np.sign(score(fit, np.asarray(grid, dtype=float)))
    s = s[s != 0]
    return int(np.count_nonzero(np.diff(s)))


def reconstruct_density(fit: PearsonFit, lo: float, hi: float, n_points: int = 1201):
    """Density on a uniform grid from integrating the score.

    The log-density is the cumulative trapezoid integral of the score,
    exponentiated and renormalized to unit trapezoid mass on the grid.

    Returns:
        ``(x, density)`` arrays of length ``n_points``.

    Raises:
        PoleInGrid: the denominator vanishes or changes sign on ``[lo, hi]``.
    """
    if n_points < 16:
        raise ValueError("n_points must be at least 16")
    if not hi > lo:
        raise ValueError("need lo < hi")
    x = np.linspace(lo, hi, int(n_points))
    den = fit.denominator(x)
    if np.any(np.abs(den) <= fit.eps_den) or np.any(np.sign(den[1:]) != np.sign(den[:-1])):
        raise PoleInGrid(f"Pearson denominator has a root in [{lo}, {hi}]")
    s = (x - fit.loc - fit.a) / den
    sign = np.sign(s)
    sign = sign[sign != 0]
    if np.count_nonzero(np.diff(sign)) > 1:
        warnings.warn("fitted score has more than one sign change; data may be multimodal",
                      MultimodalWarning, stacklevel=2)
    logf = cumulative_trapezoid(s, x, initial=0.0)
    f = np.exp(logf - logf.max())
    f /= trapezoid(f, x)
    return x, f


def density_at(fit: PearsonFit, z, lo: float, hi: float, n_points: int = 4001):
    """Reconstructed density interpolated at ``z`` (zero outside the grid)."""
    x, f = reconstruct_density(fit, lo, hi, n_points)
    return np.interp(np.asarray(z, dtype=float), x, f, left=0.0, right=0.0)


__all__ = [
    "PearsonFit",
    "MultimodalWarning",
    "fit_pearson",
    "fit_sample",
    "score",
    "score_derivative",
    "score_sign_changes",
    "reconstruct_density",
    "density_at",
    "EPS_A",
    "EPS_DEN",
]
