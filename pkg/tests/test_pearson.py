import math
import warnings

import numpy as np
import pytest
from scipy import stats
from scipy.integrate import trapezoid

from ebkit.errors import DegenerateDenominator, PoleAtX, PoleInGrid, ZeroVariance
from ebkit.moments import MomentSummary, classical_moments
from ebkit.pearson import (
    MultimodalWarning,
    fit_pearson,
    fit_sample,
    reconstruct_density,
    score,
    score_derivative,
    score_sign_changes,
)

MICRO = MomentSummary.from_standardized(1.2885, 0.04181, 3.6445)


@pytest.fixture
def std_normal():
    return fit_pearson(MomentSummary.from_standardized(1.0, 0.0, 3.0))


@pytest.fixture
def micro():
    return fit_pearson(MICRO)


class TestFit:
    def test_standard_normal(self, std_normal):
        f = std_normal
        assert (f.A, f.c0, f.a, f.c1) == (12.0, -1.0, 0.0, 0.0)
        assert f.c2 == pytest.approx(0.0, abs=1e-15)

    def test_microarray(self, micro):
        assert micro.c0 == pytest.approx(-1.019168, abs=5e-4)
        assert micro.a == pytest.approx(-0.017116, abs=5e-4)
        assert micro.c2 == pytest.approx(-0.069679, abs=5e-4)
        assert micro.A == pytest.approx(18.42417, abs=5e-4)
        assert micro.c1 == micro.a

    def test_uniform_degenerate(self):
        with pytest.raises(DegenerateDenominator):
            fit_pearson(MomentSummary.from_standardized(1.0, 0.0, 1.8))

    def test_zero_variance(self):
        with pytest.raises(ZeroVariance):
            fit_sample([2.0, 2.0, 2.0])

    def test_json_keys(self, micro):
        assert set(micro.to_dict()) == {"a", "c0", "c1", "c2", "A", "moments"}
        assert '"c0"' in micro.to_json()


class TestScore:
    def test_normal_score(self, std_normal):
        assert score(std_normal, 2.0) == -2.0
        np.testing.assert_allclose(score_derivative(std_normal, np.linspace(-3, 3, 7)), -1.0)

    def test_microarray_at_max_z(self, micro):
        expected = (5.29 + 0.017116) / (-1.019168 - 0.017116 * 5.29 - 0.069679 * 5.29**2)
        assert score(micro, 5.29) == pytest.approx(expected, abs=1e-3)
        assert score(micro, 5.29) == pytest.approx(-1.7345, abs=1e-3)

    def test_zero_at_a(self, micro):
        assert score(micro, micro.a + micro.loc) == 0.0

    def test_finite_difference(self, micro):
        h = 1e-5
        fd = (score(micro, 1.3 + h) - score(micro, 1.3 - h)) / (2 * h)
        assert score_derivative(micro, 1.3) == pytest.approx(fd, rel=1e-6)

    def test_symmetric_derivative_even(self):
        f = fit_pearson(MomentSummary.from_standardized(1.5, 0.0, 4.2))
        assert score_derivative(f, 1.7) == pytest.approx(score_derivative(f, -1.7), rel=1e-14)

    def test_pole(self):
        # platykurtic: c0 < 0 < c2, so c0 + c2 x^2 = 0 at x = sqrt(-c0/c2)
        f = fit_pearson(MomentSummary.from_standardized(1.0, 0.0, 2.5))
        pole = math.sqrt(-f.c0 / f.c2)
        with pytest.raises(PoleAtX):
            score(f, pole)

    @pytest.mark.parametrize("k", [0.5, 2.0, 10.0])
    def test_scale_consistency(self, rng, k):
        x = rng.gamma(3.0, size=500)
        f, fk = fit_sample(x), fit_sample(k * x)
        for xv in (1.0, 2.5, 4.0):
            assert score(fk, k * xv) == pytest.approx(score(f, xv) / k, rel=1e-10)

    def test_moment_recurrence(self, std_normal):
        f = std_normal
        mom = [1.0, 0.0, 1.0, 0.0, 3.0]  # N(0,1) origin moments
        for n in range(4):
            lhs = -n * f.c0 * (mom[n - 1] if n else 0.0) - (n + 1) * f.c1 * mom[n] - (n + 2) * f.c2 * mom[n + 1]
            assert lhs == pytest.approx(mom[n + 1] - f.a * mom[n], abs=1e-10)

    def test_sample_fit_centers_at_mean(self, rng):
        # normal sample far from 0: score must vanish near the sample mean
        x = rng.normal(50.0, 2.0, size=20_000)
        f = fit_sample(x)
        assert abs(score(f, x.mean())) < 0.02


class TestDensity:
    def test_normal_reconstruction(self, std_normal):
        x, f = reconstruct_density(std_normal, -6, 6, 1201)
        assert np.max(np.abs(f - stats.norm.pdf(x))) < 1e-4

    def test_normalized(self, micro):
        x, f = reconstruct_density(micro, -6, 6, 1201)
        assert np.all(f >= 0)
        assert trapezoid(f, x) == pytest.approx(1.0, abs=1e-9)

    def test_microarray_unimodal(self, micro):
        assert score_sign_changes(micro, np.linspace(-6, 6, 1201)) == 1

    def test_recovers_score(self, micro):
        x, f = reconstruct_density(micro, -6, 6, 4001)
        d = np.gradient(np.log(f), x)
        inner = slice(10, -10)
        np.testing.assert_allclose(d[inner], score(micro, x[inner]), atol=1e-3)

    def test_pole_in_grid(self):
        f = fit_pearson(MomentSummary.from_standardized(1.0, 0.0, 2.5))
        with pytest.raises(PoleInGrid):
            reconstruct_density(f, -10, 10)

    def test_small_grid(self, micro):
        with pytest.raises(ValueError):
            reconstruct_density(micro, -1, 1, 8)

    def test_unimodal_fit_does_not_warn(self, micro):
        with warnings.catch_warnings():
            warnings.simplefilter("error", MultimodalWarning)
            reconstruct_density(micro, -6, 6)
