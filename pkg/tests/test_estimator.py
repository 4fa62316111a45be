import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.models.instance import ArmSet
from app.services.estimator.service import EstimatorService
from app.services.linalg.service import LinalgService
from app.utils.exceptions import InvalidInputError


def make_estimator(dim=2, lam=1.0, K=2, R=1.0, S=1.0, delta=0.05):
    state = LinalgService.new_state(dim, lam, K)
    return EstimatorService.create_state(state, R, S, delta, K)


class TestThetaHat:
    """Test the regularized least-squares estimate."""

    def test_no_observations(self):
        """Test theta_hat = 0 before any pull."""
        est = make_estimator()
        np.testing.assert_array_equal(EstimatorService.theta_hat(est), [0.0, 0.0])

    def test_scalar_closed_form(self):
        """Test one pull of x = 1 with reward 2."""
        est = make_estimator(dim=1, K=1)
        LinalgService.rank_one_update(est.design, [1.0], 2.0, 0)
        assert EstimatorService.theta_hat(est)[0] == pytest.approx(1.0)

    def test_noiseless_canonical_shrinkage(self):
        """Test theta_hat = 100/101 theta after 100 noiseless pulls per arm."""
        theta = np.array([0.7, -0.2, 1.5])
        est = make_estimator(dim=3, K=3)
        for arm in range(3):
            for _ in range(100):
                LinalgService.rank_one_update(est.design, np.eye(3)[arm],
                                              theta[arm], arm)
        np.testing.assert_allclose(EstimatorService.theta_hat(est),
                                   theta * 100 / 101, atol=1e-10)


class TestConfidenceScale:
    """Test C_t."""

    def test_initial_value(self):
        """Test C_0 with R=1, S=2, lambda=1, K=3, delta=0.05."""
        est = make_estimator(dim=2, K=3, S=2.0)
        expected = math.sqrt(2 * math.log(180)) + 2
        assert EstimatorService.confidence_scale(est) == pytest.approx(expected)
        assert EstimatorService.confidence_scale(est) == pytest.approx(5.2227, abs=1e-4)

    def test_log_term_vanishes(self):
        """Test C -> sqrt(lambda) S as delta -> 1 with K = 1."""
        est = make_estimator(dim=2, lam=4.0, K=1, S=1.5, delta=1 - 1e-12)
        assert EstimatorService.confidence_scale(est) == pytest.approx(3.0, abs=1e-5)

    def test_nondecreasing_and_bounded(self, rng):
        """Test monotonicity of C_t and the determinant-based bound."""
        est = make_estimator(dim=3, K=3)
        previous = EstimatorService.confidence_scale(est)
        for n in range(1, 201):
            x = rng.standard_normal(3)
            x /= np.linalg.norm(x)
            LinalgService.rank_one_update(est.design, x, 0.0, 0)
            current = EstimatorService.confidence_scale(est)
            assert current >= previous - 1e-12
            assert current <= EstimatorService.confidence_scale_bound(est, n, 1.0) + 1e-12
            previous = current

    def test_pair_correction_default(self):
        """Test the K^2 union-bound multiplier."""
        est = make_estimator(K=4)
        assert est.pair_correction == 16.0

    def test_invalid_delta(self):
        """Test rejection of delta outside (0, 1)."""
        state = LinalgService.new_state(2, 1.0, 2)
        with pytest.raises(InvalidInputError):
            EstimatorService.create_state(state, 1.0, 1.0, 1.5, 2)


class TestGaps:
    """Test estimated gaps and their widths."""

    def test_self_gap_is_zero(self):
        """Test Delta_hat(i, i) = beta(i, i) = 0."""
        est = make_estimator()
        arms = ArmSet(features=np.eye(2))
        assert EstimatorService.gap_estimate(est, 1, 1, arms) == 0.0
        assert EstimatorService.gap_width(est, 1, 1, arms) == 0.0

    def test_estimated_gap_example(self):
        """Test Delta_hat(1, 2) = 1 for theta_hat = (-1, 0)."""
        est = make_estimator(K=3)
        # theta_hat = A^{-1} b with A = I
        est.design.response = np.array([-1.0, 0.0])
        arms = ArmSet(features=[[-10.0, 10.0], [-9.0, 10.0], [-1.0, 0.0]])
        assert EstimatorService.gap_estimate(est, 0, 1, arms) == pytest.approx(1.0)

    def test_width_example(self):
        """Test beta at t = 0 with canonical arms."""
        est = make_estimator(dim=2, K=2, R=1.0, S=1.0)
        arms = ArmSet(features=np.eye(2))
        expected = math.sqrt(2) * (math.sqrt(2 * math.log(4 / 0.05)) + 1)
        assert EstimatorService.gap_width(est, 0, 1, arms) == pytest.approx(expected)
        assert expected == pytest.approx(5.6013, abs=1e-3)

    def test_index_out_of_range(self):
        """Test rejection of unknown arms."""
        est = make_estimator()
        arms = ArmSet(features=np.eye(2))
        with pytest.raises(InvalidInputError):
            EstimatorService.gap_estimate(est, 0, 2, arms)
        with pytest.raises(InvalidInputError):
            EstimatorService.gap_width(est, -1, 0, arms)

    @settings(max_examples=50, deadline=None)
    @given(seed=st.integers(0, 2 ** 32 - 1))
    def test_antisymmetry_and_symmetry(self, seed):
        """Test Delta_hat(i,j) = -Delta_hat(j,i) and beta(i,j) = beta(j,i)."""
        rng = np.random.default_rng(seed)
        est = make_estimator(dim=3, K=4)
        arms = ArmSet(features=rng.standard_normal((4, 3)))
        for _ in range(6):
            arm = int(rng.integers(4))
            LinalgService.rank_one_update(est.design, arms.features[arm],
                                          float(rng.standard_normal()), arm)
        for i in range(4):
            for j in range(4):
                assert EstimatorService.gap_estimate(est, i, j, arms) == pytest.approx(
                    -EstimatorService.gap_estimate(est, j, i, arms), abs=1e-12)
                assert EstimatorService.gap_width(est, i, j, arms) == pytest.approx(
                    EstimatorService.gap_width(est, j, i, arms), abs=1e-12)

    def test_vectorized_against_scalar(self, rng):
        """Test gaps_against and widths_against."""
        est = make_estimator(dim=3, K=5)
        arms = ArmSet(features=rng.standard_normal((5, 3)))
        for arm in range(5):
            LinalgService.rank_one_update(est.design, arms.features[arm],
                                          float(rng.standard_normal()), arm)
        gaps = EstimatorService.gaps_against(est, 2, arms)
        widths = EstimatorService.widths_against(est, 2, arms)
        for j in range(5):
            assert gaps[j] == pytest.approx(
                EstimatorService.gap_estimate(est, j, 2, arms), abs=1e-12)
            assert widths[j] == pytest.approx(
                EstimatorService.gap_width(est, j, 2, arms), rel=1e-10, abs=1e-12)


class TestStaticWidth:
    """Test the fixed-sequence width."""

    def test_zero_direction(self):
        """Test that y = 0 has zero width."""
        state = LinalgService.new_state(2, 1.0, 2)
        assert EstimatorService.static_width(state, [0.0, 0.0], 1.0, 2, 1, 0.05) == 0.0

    def test_direct_evaluation(self):
        """Test A = I, y = e_1, sigma = 1, K = 2, n = 1."""
        state = LinalgService.new_state(2, 1.0, 2)
        expected = 2 * math.sqrt(2 * math.log(12 / (0.05 * math.pi ** 2)))
        assert EstimatorService.static_width(state, [1.0, 0.0], 1.0, 2, 1, 0.05) == (
            pytest.approx(expected))

    def test_increasing_in_n(self):
        """Test that the width grows with n for a fixed design."""
        state = LinalgService.new_state(2, 1.0, 2)
        widths = [EstimatorService.static_width(state, [1.0, 1.0], 1.0, 3, n, 0.05)
                  for n in (1, 2, 10, 1000)]
        assert all(a < b for a, b in zip(widths, widths[1:]))

    def test_rejects_n_below_one(self):
        """Test rejection of n = 0."""
        state = LinalgService.new_state(2, 1.0, 2)
        with pytest.raises(InvalidInputError):
            EstimatorService.static_width(state, [1.0, 0.0], 1.0, 2, 0, 0.05)
