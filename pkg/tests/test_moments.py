import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ebkit.errors import EmptySample, InvalidInterval, LengthMismatch, ZeroVariance
from ebkit.moments import (
    IntervalBox,
    MomentSummary,
    as_bounds,
    classical_moments,
    pearson_inequality_holds,
    symbolic_covariance,
    symbolic_covariance_matrix,
    symbolic_mean,
    symbolic_variance,
    uniform_interval_variance,
)
from conftest import random_intervals


class TestClassicalMoments:
    def test_constant_sample(self):
        m = classical_moments([0, 0, 0, 0])
        assert m.mu1 == 0 and m.mu2 == 0
        with pytest.raises(ZeroVariance):
            _ = m.beta1
        with pytest.raises(ZeroVariance):
            _ = m.beta2

    def test_symmetric_pair(self):
        m = classical_moments([-1, 1])
        assert (m.mu1, m.mu2, m.mu3) == (0, 1, 0)
        assert m.beta1 == 0

    @pytest.mark.parametrize("sample", [[], [3.0]])
    def test_too_short(self, sample):
        with pytest.raises(EmptySample):
            classical_moments(sample)

    def test_denominator_n(self):
        x = np.array([1.0, 2.0, 4.0, 7.0])
        m = classical_moments(x)
        d = x - x.mean()
        assert m.mu2 == pytest.approx(np.sum(d**2) / 4, rel=1e-15)
        assert m.mu4 == pytest.approx(np.sum(d**4) / 4, rel=1e-15)

    @pytest.mark.parametrize("k", [-50.0, 0.3, 1e3])
    def test_shift_invariance(self, rng, k):
        x = rng.gamma(2.0, size=300)
        a, b = classical_moments(x), classical_moments(x + k)
        assert b.mu1 == pytest.approx(a.mu1 + k, rel=1e-12)
        for name in ("mu2", "mu3", "mu4", "beta1", "beta2"):
            assert getattr(b, name) == pytest.approx(getattr(a, name), rel=1e-9, abs=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1e3, 1e3), min_size=2, max_size=40))
    def test_pearson_inequality(self, xs):
        assert pearson_inequality_holds(classical_moments(xs), tol=1e-9)

    def test_from_standardized_roundtrip(self):
        m = MomentSummary.from_standardized(2.0, 0.5, 4.0, mu1=1.0)
        assert m.beta1 == pytest.approx(0.5)
        assert m.beta2 == pytest.approx(4.0)
        assert m.to_dict()["mu1"] == 1.0


class TestIntervalBox:
    def test_center_roundtrip(self):
        b = IntervalBox([1.0, -2.0], [3.0, 5.0])
        np.testing.assert_array_equal(b.center - b.half_width, b.lower)
        np.testing.assert_array_equal(b.center + b.half_width, b.upper)
        assert b.p == 2

    def test_invalid(self):
        with pytest.raises(InvalidInterval):
            IntervalBox([2.0], [1.0])
        with pytest.raises(InvalidInterval):
            IntervalBox.from_center([0.0], [-1.0])

    def test_degenerate_is_legal(self):
        assert IntervalBox([1.0], [1.0]).half_width[0] == 0

    @pytest.mark.parametrize(
        "data",
        [
            [(0, 2), (2, 4)],
            np.array([[0, 2], [2, 4]]),
            [IntervalBox([0], [2]), IntervalBox([2], [4])],
            (np.array([0.0, 2.0]), np.array([2.0, 4.0])),
        ],
    )
    def test_as_bounds_inputs(self, data):
        lo, hi = as_bounds(data)
        np.testing.assert_array_equal(lo[:, 0], [0, 2])
        np.testing.assert_array_equal(hi[:, 0], [2, 4])


class TestSymbolicStatistics:
    def test_mean_examples(self):
        assert symbolic_mean([(1, 1), (3, 3)]) == 2
        assert symbolic_mean([(0, 2), (2, 4)]) == 2

    def test_horse_centers(self):
        horses = [(135, 147), (130, 150), (135, 148), (135, 147), (145, 155)]
        lo, hi = as_bounds(horses)
        np.testing.assert_allclose((lo + hi)[:, 0] / 2, [141, 140, 141.5, 141, 150])

    def test_empty(self):
        with pytest.raises(EmptySample):
            symbolic_mean([])

    def test_variance_uniform(self):
        assert symbolic_variance([(0, 1)]) == pytest.approx(1 / 12, rel=1e-14)
        assert uniform_interval_variance(0, 1) == pytest.approx(1 / 12)

    def test_variance_degenerate(self):
        assert symbolic_variance([(2, 2), (5, 5)]) == pytest.approx(np.var([2, 5]))

    def test_variance_monte_carlo(self, rng):
        lo, hi = random_intervals(rng, 5)
        # empirical mixture: pick an interval uniformly, then a uniform point inside it
        idx = rng.integers(0, 5, size=100_000)
        draws = rng.uniform(lo[idx], hi[idx])
        assert symbolic_variance((lo, hi)) == pytest.approx(np.var(draws), abs=1e-2 * max(1, np.var(draws)))

    def test_forms_agree(self, rng):
        lo, hi = random_intervals(rng, 30)
        lo, hi = lo + 100, hi + 100
        for f in (symbolic_variance,):
            assert f((lo, hi), "bounds") == pytest.approx(f((lo, hi), "center"), rel=1e-12)
        lo2, hi2 = random_intervals(rng, 30)
        assert symbolic_covariance((lo, hi), (lo2, hi2), "bounds") == pytest.approx(
            symbolic_covariance((lo, hi), (lo2, hi2), "center"), rel=1e-10
        )

    def test_variance_at_least_center_variance(self, rng):
        lo, hi = random_intervals(rng, 20)
        assert symbolic_variance((lo, hi)) > np.var((lo + hi) / 2)
        c = (lo + hi) / 2
        assert symbolic_variance((c, c)) == pytest.approx(np.var(c), rel=1e-12)

    def test_covariance_lacks_width_term(self):
        x = [(0, 2), (1, 3)]
        assert symbolic_covariance(x, x) == pytest.approx(0.25)
        assert symbolic_variance(x) == pytest.approx(0.25 + 1 / 3)

    def test_covariance_constant_centers(self):
        assert symbolic_covariance([(0, 2), (0.5, 1.5)], [(3, 4), (5, 6)]) == 0

    def test_covariance_length_mismatch(self):
        with pytest.raises(LengthMismatch):
            symbolic_covariance([(0, 1)], [(0, 1), (1, 2)])

    def test_permutation_invariance(self, rng):
        lo, hi = random_intervals(rng, 12)
        perm = rng.permutation(12)
        assert symbolic_variance((lo[perm], hi[perm])) == pytest.approx(symbolic_variance((lo, hi)), rel=1e-13)
        assert symbolic_mean((lo[perm], hi[perm])) == pytest.approx(symbolic_mean((lo, hi)), rel=1e-13)

    def test_covariance_matrix(self, rng):
        lo, hi = random_intervals(rng, 15, 3)
        S = symbolic_covariance_matrix(lo, hi)
        for j in range(3):
            assert S[j, j] == pytest.approx(symbolic_variance((lo[:, j], hi[:, j])), rel=1e-12)
        assert S[0, 2] == pytest.approx(symbolic_covariance((lo[:, 0], hi[:, 0]), (lo[:, 2], hi[:, 2])), rel=1e-12)
