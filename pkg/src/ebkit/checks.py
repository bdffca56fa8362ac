"""Built-in self-check suite run by ``ebkit check``."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from . import saddlepoint as sp
from .moments import MomentSummary
from .pearson import fit_pearson, score


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


def _table_identities() -> tuple[bool, str]:
    cases = [
        ("normal", {"sigma2": 2.0}, [-2.0, -0.5, 0.3, 1.0, 3.0]),
        ("gamma", {"alpha": 3.0, "beta": 2.0}, [0.5, 1.0, 2.0, 4.0, 7.0]),
        ("chi_square", {"k": 4.0}, [0.5, 1.0, 3.0, 6.0, 10.0]),
        ("poisson", {"lam": 2.0}, [1.0, 2.0, 5.0, 9.0, 15.0]),
    ]
    worst = 0.0
    for name, params, xs in cases:
        model = sp.get_model(name, **params)
        for x in xs:
            worst = max(worst, _rel(sp.generalized_tweedie_term(model, x), sp.table_closed_form(name, x, **params)))
    return worst < 1e-9, f"max rel err {worst:.2e}"


def _exponential_row() -> tuple[bool, str]:
    lam = 1.5
    model = sp.get_model("exponential", lam=lam)
    worst = max(abs(sp.generalized_tweedie_term(model, x) - lam) for x in (0.2, 1.0, 4.0))
    return worst < 1e-12, f"generic term equals lam={lam} (max dev {worst:.1e})"


def _normal_exact() -> tuple[bool, str]:
    model = sp.get_model("normal", sigma2=1.7)
    worst = max(abs(sp.accuracy_ratio(model, x) - 1.0) for x in range(-3, 4))
    return worst < 1e-12, f"max |ratio-1| {worst:.1e}"


def _exponential_ratio() -> tuple[bool, str]:
    model = sp.get_model("exponential", lam=0.7)
    target = math.e / math.sqrt(2.0 * math.pi)
    worst = max(abs(sp.accuracy_ratio(model, x) - target) for x in (0.1, 1.0, 5.0))
    return worst < 1e-9, f"ratio e/sqrt(2pi)={target:.6f} (max dev {worst:.1e})"


def _cgf_zero() -> tuple[bool, str]:
    worst = max(abs(m.K(0.0)) for m in sp.builtin_models())
    return worst < 1e-12, f"max |K(0)| {worst:.1e}"


def _pearson_normal() -> tuple[bool, str]:
    mu2 = 2.5
    fit = fit_pearson(MomentSummary.from_standardized(mu2, 0.0, 3.0))
    ok = abs(fit.A - 12.0) < 1e-12 and abs(fit.c0 + mu2) < 1e-12 and fit.a == 0.0 and abs(fit.c2) < 1e-12
    dev = max(abs(score(fit, x) + x / mu2) for x in (-2.0, 0.5, 3.0))
    return ok and dev < 1e-12, f"A={fit.A:g} c0={fit.c0:g} c2={fit.c2:g}, score=-x/mu2 dev {dev:.1e}"


CHECKS: list[tuple[str, Callable[[], tuple[bool, str]]]] = [
    ("closed-form corrections", _table_identities),
    ("exponential generic term", _exponential_row),
    ("normal saddlepoint exact", _normal_exact),
    ("exponential saddle ratio", _exponential_ratio),
    ("cgf K(0)=0", _cgf_zero),
    ("pearson normal case", _pearson_normal),
]


def run_checks() -> list[CheckResult]:
    out = []
    for name, fn in CHECKS:
        try:
            ok, detail = fn()
        except Exception as exc:  # report, don't abort the suite
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), detail))
    return out
