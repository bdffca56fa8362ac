"""Saddlepoint density approximation over cumulant generating functions.

For a CGF ``K`` the saddlepoint density at ``x`` is

    f(x) ~ (2*pi*K''(t))**-0.5 * exp(K(t) - t*x),   K'(t) = x.

The same saddlepoint ``t`` drives a general-family Tweedie correction
``t + 0.5 * K'''(t) / K''(t)**2`` (``dt/dx = 1/K''(t)``), which is the part
of the posterior mean that does not depend on the marginal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import special, stats

from .errors import NoConvergence, NotAvailable, OutOfRange, UnknownModel

Fn = Callable[[float], float]


@dataclass(frozen=True)
class CgfModel:
    """A named CGF family with its first three derivatives.

    ``domain`` is the open interval of valid ``t``; ``mean_range`` the open
    range of ``K'`` over that domain (the support interior for continuous
    families, the convex hull of the support for discrete ones).
    """

    name: str
    params: dict
    K: Fn
    K1: Fn
    K2: Fn
    K3: Fn
    domain: tuple[float, float] = (-math.inf, math.inf)
    mean_range: tuple[float, float] = (-math.inf, math.inf)
    exact: Optional[Fn] = None
    discrete: bool = False
    exponential_family: bool = True
    closed_form_inverse: bool = True
    correction_available: bool = True
    notes: str = field(default="", compare=False)

    def __repr__(self) -> str:
        ps = ", ".join(f"{k}={v}" for k, v in self.params.items())
        return f"CgfModel({self.name}: {ps})"


@dataclass(frozen=True)
class SaddleResult:
    t_hat: float
    density: float
    iterations: int


def normal(sigma2: float = 1.0, mu: float = 0.0) -> CgfModel:
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    sd = math.sqrt(sigma2)
    return CgfModel(
        "normal", {"mu": mu, "sigma2": sigma2},
        K=lambda t: mu * t + sigma2 * t * t / 2.0,
        K1=lambda t: mu + sigma2 * t,
        K2=lambda t: sigma2,
        K3=lambda t: 0.0,
        exact=lambda x: float(stats.norm.pdf(x, mu, sd)),
    )


def laplace(b: float = 1.0, mu: float = 0.0) -> CgfModel:
    if b <= 0:
        raise ValueError("b must be positive")
    b2 = b * b

    def K(t):
        return mu * t - math.log1p(-b2 * t * t)

    def K1(t):
        return mu + 2.0 * b2 * t / (1.0 - b2 * t * t)

    def K2(t):
        q = 1.0 - b2 * t * t
        return 2.0 * b2 * (1.0 + b2 * t * t) / (q * q)

    def K3(t):
        q = 1.0 - b2 * t * t
        return 4.0 * b2 * b2 * t * (3.0 + b2 * t * t) / q**3

    return CgfModel(
        "laplace", {"mu": mu, "b": b}, K, K1, K2, K3,
        domain=(-1.0 / b, 1.0 / b),
        exact=lambda x: float(stats.laplace.pdf(x, mu, b)),
        exponential_family=False,
        notes="not a member of the exponential family",
    )


def gamma(alpha: float = 2.0, beta: float = 1.0) -> CgfModel:
    if alpha <= 0 or beta <= 0:
        raise ValueError("alpha and beta must be positive")
    return CgfModel(
        "gamma", {"alpha": alpha, "beta": beta},
        K=lambda t: -alpha * math.log1p(-t / beta),
        K1=lambda t: alpha / (beta - t),
        K2=lambda t: alpha / (beta - t) ** 2,
        K3=lambda t: 2.0 * alpha / (beta - t) ** 3,
        domain=(-math.inf, beta),
        mean_range=(0.0, math.inf),
        exact=lambda x: float(stats.gamma.pdf(x, alpha, scale=1.0 / beta)),
    )


def chi_square(k: float = 3.0) -> CgfModel:
    if k <= 0:
        raise ValueError("k must be positive")
    return CgfModel(
        "chi_square", {"k": k},
        K=lambda t: -k / 2.0 * math.log1p(-2.0 * t),
        K1=lambda t: k / (1.0 - 2.0 * t),
        K2=lambda t: 2.0 * k / (1.0 - 2.0 * t) ** 2,
        K3=lambda t: 8.0 * k / (1.0 - 2.0 * t) ** 3,
        domain=(-math.inf, 0.5),
        mean_range=(0.0, math.inf),
        exact=lambda x: float(stats.chi2.pdf(x, k)),
    )


def exponential(lam: float = 1.0) -> CgfModel:
    if lam <= 0:
        raise ValueError("lam must be positive")
    return CgfModel(
        "exponential", {"lam": lam},
        K=lambda t: -math.log1p(-t / lam),
        K1=lambda t: 1.0 / (lam - t),
        K2=lambda t: 1.0 / (lam - t) ** 2,
        K3=lambda t: 2.0 / (lam - t) ** 3,
        domain=(-math.inf, lam),
        mean_range=(0.0, math.inf),
        exact=lambda x: float(stats.expon.pdf(x, scale=1.0 / lam)),
    )


def poisson(lam: float = 1.0) -> CgfModel:
    if lam <= 0:
        raise ValueError("lam must be positive")
    return CgfModel(
        "poisson", {"lam": lam},
        K=lambda t: lam * math.expm1(t),
        K1=lambda t: lam * math.exp(t),
        K2=lambda t: lam * math.exp(t),
        K3=lambda t: lam * math.exp(t),
        mean_range=(0.0, math.inf),
        exact=lambda x: float(stats.poisson.pmf(x, lam)),
        discrete=True,
    )


def binomial(n: int = 10, p: float = 0.5) -> CgfModel:
    if n < 1 or not 0 < p < 1:
        raise ValueError("need n >= 1 and 0 < p < 1")

    def pe(t):
        # success probability tilted by t
        return p * math.exp(t) / (1.0 - p + p * math.exp(t))

    return CgfModel(
        "binomial", {"n": n, "p": p},
        K=lambda t: n * math.log1p(p * math.expm1(t)),
        K1=lambda t: n * pe(t),
        K2=lambda t: n * pe(t) * (1.0 - pe(t)),
        K3=lambda t: n * pe(t) * (1.0 - pe(t)) * (1.0 - 2.0 * pe(t)),
        mean_range=(0.0, float(n)),
        exact=lambda x: float(stats.binom.pmf(x, n, p)),
        discrete=True,
        correction_available=False,
    )


def geometric(p: float = 0.5) -> CgfModel:
    """Geometric on ``{1, 2, ...}`` with success probability ``p``."""
    if not 0 < p < 1:
        raise ValueError("need 0 < p < 1")
    q0 = 1.0 - p

    def q(t):
        return q0 * math.exp(t)

    return CgfModel(
        "geometric", {"p": p},
        K=lambda t: math.log(p) + t - math.log1p(-q(t)),
        K1=lambda t: 1.0 + q(t) / (1.0 - q(t)),
        K2=lambda t: q(t) / (1.0 - q(t)) ** 2,
        K3=lambda t: q(t) * (1.0 + q(t)) / (1.0 - q(t)) ** 3,
        domain=(-math.inf, -math.log(q0)),
        mean_range=(1.0, math.inf),
        exact=lambda x: float(stats.geom.pmf(x, p)),
        discrete=True,
    )


def beta(alpha: float = 2.0, beta_: float = 3.0) -> CgfModel:
    """Beta CGF ``log 1F1(alpha; alpha+beta; t)`` (no closed-form saddlepoint)."""
    if alpha <= 0 or beta_ <= 0:
        raise ValueError("alpha and beta must be positive")
    s = alpha + beta_

    def m(k, t):
        # k-th derivative of the MGF
        return special.poch(alpha, k) / special.poch(s, k) * special.hyp1f1(alpha + k, s + k, t)

    def K1(t):
        return m(1, t) / m(0, t)

    def K2(t):
        m0 = m(0, t)
        return m(2, t) / m0 - (m(1, t) / m0) ** 2

    def K3(t):
        m0 = m(0, t)
        k1 = m(1, t) / m0
        return m(3, t) / m0 - 3.0 * (m(2, t) / m0) * k1 + 2.0 * k1**3

    return CgfModel(
        "beta", {"alpha": alpha, "beta": beta_},
        K=lambda t: math.log(special.hyp1f1(alpha, s, t)),
        K1=K1, K2=K2, K3=K3,
        mean_range=(0.0, 1.0),
        exact=lambda x: float(stats.beta.pdf(x, alpha, beta_)),
        closed_form_inverse=False,
        correction_available=False,
    )


_FACTORIES: dict[str, Callable[..., CgfModel]] = {
    "normal": normal,
    "laplace": laplace,
    "gamma": gamma,
    "chi_square": chi_square,
    "exponential": exponential,
    "beta": beta,
    "poisson": poisson,
    "binomial": binomial,
    "geometric": geometric,
}

_ALIASES = {"chi2": "chi_square", "chisq": "chi_square", "chi-square": "chi_square", "expon": "exponential"}


def get_model(name: str, **params) -> CgfModel:
    key = _ALIASES.get(name.lower(), name.lower())
    if key == "beta" and "beta" in params:
        params["beta_"] = params.pop("beta")
    try:
        factory = _FACTORIES[key]
    except KeyError:
        raise UnknownModel(f"unknown distribution {name!r}; choose from {sorted(_FACTORIES)}") from None
    return factory(**params)


def builtin_models() -> list[CgfModel]:
    """One instance of every registered family with default parameters."""
    return [factory() for factory in _FACTORIES.values()]


def _in_domain(model: CgfModel, t: float) -> bool:
    lo, hi = model.domain
    return lo < t < hi


def solve_saddle(model: CgfModel, x: float, tol: float = 1e-10, max_iter: int = 100) -> tuple[float, int]:
    """Solve ``K'(t) = x`` by safeguarded Newton iteration.

    A bracket ``[a, b]`` with ``K'(a) < x < K'(b)`` is grown from ``t = 0``;
    Newton steps that leave the bracket are replaced by bisection.

    Returns:
        ``(t_hat, iterations)``.

    Raises:
        OutOfRange: ``x`` not in the open range of ``K'``.
        NoConvergence: tolerance not met within ``max_iter`` iterations.
    """
    x = float(x)
    rlo, rhi = model.mean_range
    if not (rlo < x < rhi) or not math.isfinite(x):
        raise OutOfRange(f"x={x} outside the range ({rlo}, {rhi}) of K' for {model.name}")
    # relative target (stricter than max(1, |x|)) so tiny x still resolve t accurately
    target = tol * max(abs(x), 1e-8) if abs(x) < 1.0 else tol * abs(x)
    dlo, dhi = model.domain

    def g(t):
        try:
            return model.K1(t) - x
        except (OverflowError, ZeroDivisionError):
            return math.inf

    t = 0.0
    gt = g(t)
    iterations = 0
    if abs(gt) < target:
        return t, iterations

    # bracket: K' is increasing, so move toward the side where the root lies
    a, b = (t, None) if gt < 0 else (None, t)
    step = 1.0
    while a is None or b is None:
        iterations += 1
        if iterations > 4 * max_iter:
            raise NoConvergence(f"could not bracket the saddlepoint for x={x}")
        if a is None:
            cand = b - step if math.isinf(dlo) else (b + dlo) / 2.0
            gc = g(cand)
            if gc < 0:
                a = cand
            else:
                b, gt = cand, gc
        else:
            cand = a + step if math.isinf(dhi) else (a + dhi) / 2.0
            gc = g(cand)
            if gc > 0:
                b = cand
            else:
                a, gt = cand, gc
        step *= 2.0

    t = a if abs(g(a)) < abs(g(b)) else b
    gt = g(t)
    for it in range(1, max_iter + 1):
        if abs(gt) < target:
            return t, it - 1 + iterations
        d = model.K2(t)
        newton = t - gt / d if d > 0 and math.isfinite(d) else math.nan
        if not (a < newton < b):
            newton = 0.5 * (a + b)
        t = newton
        gt = g(t)
        if gt < 0:
            a = t
        else:
            b = t
        if b - a <= 4 * np.finfo(float).eps * max(1.0, abs(t)) and abs(gt) >= target:
            break
    if abs(gt) < target:
        return t, max_iter + iterations
    raise NoConvergence(f"saddlepoint equation for {model.name} at x={x} did not converge (|K'-x|={abs(gt):.3g})")


def saddle_density(model: CgfModel, x: float) -> SaddleResult:
    """Saddlepoint approximation of the density (or pmf) at ``x``."""
    t, its = solve_saddle(model, x)
    k2 = model.K2(t)
    dens = math.exp(model.K(t) - t * x) / math.sqrt(2.0 * math.pi * k2)
    return SaddleResult(t_hat=t, density=dens, iterations=its)


def generalized_tweedie_term(model: CgfModel, x: float) -> float:
    """Marginal-free part of the general-family posterior mean at ``x``.

    Returns ``t + 0.5 * K'''(t) / K''(t) * dt/dx`` with ``K'(t) = x`` and
    ``dt/dx = 1 / K''(t)``; adding the marginal score ``h(x)`` gives
    ``E[theta|x]`` for a single observation.
    """
    if not model.correction_available:
        raise NotAvailable(f"no generalized Tweedie correction for {model.name}")
    t, _ = solve_saddle(model, x)
    k2 = model.K2(t)
    return t + 0.5 * model.K3(t) / k2 / k2


def generalized_posterior_mean(model: CgfModel, x: float, marginal_score: float) -> float:
    """``E[theta|x] = h(x) + generalized_tweedie_term(model, x)``."""
    return float(marginal_score) + generalized_tweedie_term(model, x)


def table_closed_form(name: str, x: float, **params) -> float:
    """Printed closed forms of the correction for the families that have one.

    The exponential entry is deliberately absent: the printed expression does
    not follow from its own CGF, whose generic value is exactly ``lam``.
    """
    if name == "normal":
        return x / params.get("sigma2", 1.0)
    if name == "gamma":
        return params["beta"] - params["alpha"] / x + 1.0 / x
    if name == "chi_square":
        return 0.5 - params["k"] / (2.0 * x) + 1.0 / x
    if name == "poisson":
        return math.log(x / params["lam"]) + 1.0 / (2.0 * x)
    raise NotAvailable(f"no closed form for {name}")


def accuracy_ratio(model: CgfModel, x: float) -> float:
    """Saddlepoint approximation divided by the exact density."""
    if model.exact is None:
        raise NotAvailable(f"no exact density for {model.name}")
    return saddle_density(model, x).density / model.exact(x)


__all__ = [
    "CgfModel",
    "SaddleResult",
    "normal",
    "laplace",
    "gamma",
    "chi_square",
    "exponential",
    "beta",
    "poisson",
    "binomial",
    "geometric",
    "get_model",
    "builtin_models",
    "solve_saddle",
    "saddle_density",
    "generalized_tweedie_term",
    "generalized_posterior_mean",
    "table_closed_form",
    "accuracy_ratio",
]
