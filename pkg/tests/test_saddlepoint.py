import math

import numpy as np
import pytest

from ebkit import saddlepoint as sp
from ebkit.errors import NotAvailable, OutOfRange, UnknownModel

E_OVER_ROOT_2PI = math.e / math.sqrt(2 * math.pi)


def interior_ts(model, n=20):
    lo, hi = model.domain
    lo = max(lo, -2.0)
    hi = min(hi, 2.0)
    span = hi - lo
    return np.linspace(lo + 0.1 * span, hi - 0.1 * span, n)


def stirling_choose(n, x):
    def st(k):
        return math.sqrt(2 * math.pi * k) * (k / math.e) ** k

    return st(n) / (st(x) * st(n - x))


class TestModels:
    @pytest.mark.parametrize("model", sp.builtin_models(), ids=lambda m: m.name)
    def test_k_zero(self, model):
        assert model.K(0.0) == pytest.approx(0.0, abs=1e-14)

    @pytest.mark.parametrize("model", sp.builtin_models(), ids=lambda m: m.name)
    def test_derivatives_by_finite_difference(self, model):
        h = 1e-4

        def second(t, s):
            return (model.K(t + s) - 2 * model.K(t) + model.K(t - s)) / (s * s)

        for t in interior_ts(model):
            d1 = (model.K(t + h) - model.K(t - h)) / (2 * h)
            # Richardson-extrapolated second difference: wide steps, O(s^4) truncation
            d2 = (4 * second(t, 1e-3) - second(t, 2e-3)) / 3
            d3 = (model.K2(t + h) - model.K2(t - h)) / (2 * h)
            assert model.K1(t) == pytest.approx(d1, rel=1e-6, abs=1e-9)
            assert model.K2(t) == pytest.approx(d2, rel=1e-6, abs=1e-8)
            assert model.K3(t) == pytest.approx(d3, rel=1e-6, abs=1e-8)
            assert model.K2(t) > 0

    def test_binomial_mean(self):
        m = sp.get_model("binomial", n=12, p=0.3)
        assert m.K1(0.0) == pytest.approx(3.6)

    def test_geometric_mean(self):
        m = sp.get_model("geometric", p=0.25)
        h = 1e-6
        assert (m.K(h) - m.K(-h)) / (2 * h) == pytest.approx(4.0, rel=1e-8)

    def test_flags(self):
        assert not sp.get_model("laplace").exponential_family
        assert not sp.get_model("beta").closed_form_inverse
        assert sp.get_model("laplace").correction_available

    def test_aliases_and_unknown(self):
        assert sp.get_model("chi2", k=2).name == "chi_square"
        assert sp.get_model("beta", alpha=2, beta=5).params["beta"] == 5
        with pytest.raises(UnknownModel):
            sp.get_model("cauchy")


class TestSolver:
    @pytest.mark.parametrize(
        "name,params,x,expected",
        [
            ("normal", {"sigma2": 2.0}, 3.0, 1.5),
            ("poisson", {"lam": 2.0}, 5.0, math.log(2.5)),
            ("gamma", {"alpha": 3.0, "beta": 2.0}, 4.0, 1.25),
        ],
    )
    def test_known_roots(self, name, params, x, expected):
        t, its = sp.solve_saddle(sp.get_model(name, **params), x)
        assert t == pytest.approx(expected, rel=1e-10)
        assert its <= 100

    @pytest.mark.parametrize("model", sp.builtin_models(), ids=lambda m: m.name)
    def test_roundtrip(self, model):
        lo, hi = model.mean_range
        lo = lo if math.isfinite(lo) else -20.0
        hi = hi if math.isfinite(hi) else 40.0
        for x in np.linspace(lo, hi, 9)[1:-1]:
            t, _ = sp.solve_saddle(model, x)
            assert abs(model.K1(t) - x) <= 1e-10 * max(1.0, abs(x))

    @pytest.mark.parametrize("name,x", [("poisson", 0.0), ("poisson", -1.0), ("gamma", 0.0), ("binomial", 10.0),
                                        ("beta", 1.0), ("geometric", 1.0)])
    def test_out_of_range(self, name, x):
        with pytest.raises(OutOfRange):
            sp.solve_saddle(sp.get_model(name), x)

    def test_extreme_x(self):
        t, _ = sp.solve_saddle(sp.get_model("exponential", lam=1.0), 1e-6)
        assert t == pytest.approx(1.0 - 1e6, rel=1e-9)


class TestAccuracy:
    def test_normal_exact(self):
        m = sp.get_model("normal", sigma2=2.3)
        for x in range(-3, 4):
            assert sp.accuracy_ratio(m, x) == pytest.approx(1.0, rel=1e-12)

    @pytest.mark.parametrize("lam", [0.5, 1.0, 3.0])
    def test_exponential_constant_ratio(self, lam):
        m = sp.get_model("exponential", lam=lam)
        for x in (0.05, 0.7, 2.0, 9.0):
            assert sp.accuracy_ratio(m, x) == pytest.approx(E_OVER_ROOT_2PI, abs=1e-9)

    def test_poisson_factorial_oracle(self):
        m = sp.get_model("poisson", lam=2.0)
        oracle = math.factorial(5) / (math.sqrt(2 * math.pi * 5) * (5 / math.e) ** 5)
        assert sp.accuracy_ratio(m, 5) == pytest.approx(oracle, abs=1e-10)
        assert oracle == pytest.approx(1.0167, abs=1e-4)

    def test_poisson_monotone(self):
        m = sp.get_model("poisson", lam=2.0)
        r = [sp.accuracy_ratio(m, x) for x in (2, 5, 10, 20)]
        assert all(a > b > 1 for a, b in zip(r, r[1:]))

    @pytest.mark.parametrize("x", [5, 10, 15])
    def test_binomial_is_stirling(self, x):
        n = 20
        r = sp.accuracy_ratio(sp.get_model("binomial", n=n, p=0.4), x)
        assert r == pytest.approx(stirling_choose(n, x) / math.comb(n, x), rel=1e-9)
        assert 0.95 <= r <= 1.05

    def test_gamma_alpha_one(self):
        m = sp.get_model("gamma", alpha=1.0, beta=2.5)
        assert sp.accuracy_ratio(m, 1.3) == pytest.approx(E_OVER_ROOT_2PI, abs=1e-9)

    def test_density_positive(self):
        for m in sp.builtin_models():
            lo, hi = m.mean_range
            x = (lo + hi) / 2 if math.isfinite(lo) and math.isfinite(hi) else 1.5
            assert sp.saddle_density(m, x).density > 0


class TestGeneralizedTerm:
    @pytest.mark.parametrize("x", [-2.0, -0.4, 0.3, 1.0, 3.5])
    def test_normal(self, x):
        m = sp.get_model("normal", sigma2=2.0)
        assert sp.generalized_tweedie_term(m, x) == pytest.approx(x / 2.0, rel=1e-9)

    def test_gamma_hand(self):
        m = sp.get_model("gamma", alpha=3.0, beta=2.0)
        assert sp.generalized_tweedie_term(m, 4.0) == pytest.approx(2 - 3 / 4 + 1 / 4, rel=1e-9)

    def test_chi_square_hand(self):
        m = sp.get_model("chi_square", k=4.0)
        assert sp.generalized_tweedie_term(m, 3.0) == pytest.approx(0.5 - 4 / 6 + 1 / 3, rel=1e-9)

    def test_exponential_is_lambda(self):
        m = sp.get_model("exponential", lam=2.5)
        for x in (0.1, 1.0, 3.0):
            assert sp.generalized_tweedie_term(m, x) == pytest.approx(2.5, abs=1e-12)

    @pytest.mark.parametrize("name", ["beta", "binomial"])
    def test_not_available(self, name):
        with pytest.raises(NotAvailable):
            sp.generalized_tweedie_term(sp.get_model(name), 0.5 if name == "beta" else 3)

    def test_posterior_adds_score(self):
        m = sp.get_model("normal")
        assert sp.generalized_posterior_mean(m, 1.0, -0.25) == pytest.approx(0.75)
