import itertools
import math

import numpy as np
import pytest

from app.models.decomposition import Decomposition
from app.models.instance import ArmSet
from app.services.allocation.service import (
    AllocationService,
    argmax_first,
    argmin_first,
)
from app.services.instances.service import InstanceService
from app.services.linalg.service import LinalgService
from app.utils.exceptions import (
    AllocationError,
    InfeasibleDirectionError,
    InvalidInputError,
)


def exhaustive_l1(y, features):
    """Smallest ||w||_1 over every support of size <= d"""
    K, d = features.shape
    best = math.inf
    for size in range(1, d + 1):
        for support in itertools.combinations(range(K), size):
            sub = features[list(support)].T
            w = np.linalg.lstsq(sub, y, rcond=None)[0]
            if np.linalg.norm(sub @ w - y) < 1e-9:
                best = min(best, float(np.sum(np.abs(w))))
    return best


class TestL1Decompose:
    """Test the L1-minimal representation of a direction."""

    def test_canonical_pair(self):
        """Test y = e_1 - e_2 over canonical arms."""
        arms = ArmSet(features=np.eye(5))
        decomposition = AllocationService.l1_decompose(np.eye(5)[0] - np.eye(5)[1], arms)

        np.testing.assert_allclose(decomposition.weights, [1, -1, 0, 0, 0], atol=1e-12)
        np.testing.assert_allclose(decomposition.ratio, [0.5, 0.5, 0, 0, 0], atol=1e-12)
        assert decomposition.rho == pytest.approx(4.0)
        assert decomposition.support.tolist() == [0, 1]

    def test_single_arm_representation(self):
        """Test y = x_1 gives w = e_1 and rho = 1."""
        arms = ArmSet(features=np.eye(3))
        decomposition = AllocationService.l1_decompose([1.0, 0.0, 0.0], arms)
        np.testing.assert_allclose(decomposition.weights, [1, 0, 0], atol=1e-12)
        assert decomposition.rho == pytest.approx(1.0)

    def test_setting_one_direction(self, setting_one):
        """Test y = x_1 - x_6 in setting one uses e_1 and e_2."""
        arms = setting_one.arms
        decomposition = AllocationService.l1_decompose(arms.direction(0, 5), arms)

        assert decomposition.support.tolist() == [0, 1]
        assert decomposition.weights[0] == pytest.approx(1 - math.cos(0.01), rel=1e-8)
        assert decomposition.weights[1] == pytest.approx(-math.sin(0.01), rel=1e-8)
        l1 = (1 - math.cos(0.01)) + math.sin(0.01)
        assert decomposition.l1_norm == pytest.approx(l1, rel=1e-9)
        assert decomposition.l1_norm == pytest.approx(1.005e-2, rel=1e-4)
        assert decomposition.rho == pytest.approx(l1 ** 2, rel=1e-9)
        assert decomposition.ratio[1] == pytest.approx(0.99503, abs=1e-5)

    def test_representation_is_exact(self, setting_one):
        """Test sum w_k x_k = y to 1e-8 per coordinate."""
        arms = setting_one.arms
        for i, j in [(0, 5), (5, 2), (3, 4)]:
            y = arms.direction(i, j)
            decomposition = AllocationService.l1_decompose(y, arms)
            np.testing.assert_allclose(decomposition.weights @ arms.features, y,
                                       atol=1e-8)

    def test_zero_direction(self):
        """Test that y = 0 has no support."""
        arms = ArmSet(features=np.eye(2))
        decomposition = AllocationService.l1_decompose([0.0, 0.0], arms)
        assert decomposition.rho == 0.0
        assert decomposition.support.size == 0

    def test_infeasible_direction(self):
        """Test a direction outside the span of the features."""
        arms = ArmSet(features=[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]])
        with pytest.raises(InfeasibleDirectionError) as exc_info:
            AllocationService.l1_decompose([0.0, 0.0, 2.0], arms)
        assert exc_info.value.residual_norm == pytest.approx(2.0)
        assert "residual norm" in exc_info.value.detail

    def test_dimension_mismatch(self):
        """Test rejection of a wrong-length direction."""
        arms = ArmSet(features=np.eye(2))
        with pytest.raises(InvalidInputError):
            AllocationService.l1_decompose([1.0, 0.0, 0.0], arms)

    def test_matches_exhaustive_oracle(self, rng):
        """Test LP optimality on 200 random small instances."""
        for _ in range(200):
            d = int(rng.integers(1, 4))
            K = int(rng.integers(max(d, 2), 6))
            features = rng.standard_normal((K, d))
            arms = ArmSet(features=features)
            i, j = rng.choice(K, size=2, replace=False)
            y = arms.direction(int(i), int(j))
            decomposition = AllocationService.l1_decompose(y, arms)
            assert decomposition.l1_norm == pytest.approx(
                exhaustive_l1(y, features), abs=1e-6)

    def test_rho_consistency(self, rng):
        """Test sum w^2 / p = (sum |w|)^2 over the support."""
        arms = ArmSet(features=rng.standard_normal((6, 3)))
        cache = AllocationService.allocation_cache(arms)
        for i, j in cache.pairs():
            decomposition = cache.get(i, j)
            support = decomposition.support
            value = np.sum(decomposition.weights[support] ** 2
                           / decomposition.ratio[support])
            assert value == pytest.approx(decomposition.rho, rel=1e-9)


class TestAllocationCache:
    """Test the per-pair decomposition cache."""

    def test_pair_count(self):
        """Test that K = 3 gives six ordered pairs."""
        cache = AllocationService.allocation_cache(ArmSet(features=np.eye(3)))
        assert len(cache) == 6
        assert (0, 0) not in cache.decompositions

    def test_antisymmetry(self, rng):
        """Test w(i, j) = -w(j, i) and rho(i, j) = rho(j, i)."""
        arms = ArmSet(features=rng.standard_normal((5, 3)))
        cache = AllocationService.allocation_cache(arms)
        for i, j in cache.pairs():
            np.testing.assert_allclose(cache.get(i, j).weights,
                                       -cache.get(j, i).weights, atol=1e-9)
            assert cache.get(i, j).rho == cache.get(j, i).rho

    def test_triangle_bound(self, rng):
        """Test rho(i, j) <= 4 rho(i, a) + 4 rho(a, j)."""
        for _ in range(10):
            arms = ArmSet(features=rng.standard_normal((5, 3)))
            cache = AllocationService.allocation_cache(arms)
            for i, j, a in itertools.permutations(range(5), 3):
                assert cache.get(i, j).rho <= (
                    4 * cache.get(i, a).rho + 4 * cache.get(a, j).rho + 1e-9)


class TestGreedyArm:
    """Test the greedy what-if selector."""

    def test_tie_goes_to_lowest_index(self):
        """Test y = e_1 - e_2 under A = I picks arm 1."""
        state = LinalgService.new_state(5, 1.0, 5)
        arms = ArmSet(features=np.eye(5))
        assert AllocationService.greedy_arm(state, np.eye(5)[0] - np.eye(5)[1], arms) == 0

    def test_aligned_direction(self):
        """Test that only the aligned arm reduces the norm."""
        state = LinalgService.new_state(3, 1.0, 3)
        arms = ArmSet(features=np.eye(3))
        assert AllocationService.greedy_arm(state, [0.0, 0.0, 2.0], arms) == 2

    def test_matches_brute_force(self, rng):
        """Test against dense inversion for every candidate."""
        arms = ArmSet(features=rng.standard_normal((6, 4)))
        state = LinalgService.new_state(4, 1.0, 6)
        for arm in rng.integers(6, size=15):
            LinalgService.rank_one_update(state, arms.features[arm], 0.0, int(arm))
        y = arms.direction(0, 3)
        values = [y @ np.linalg.inv(state.matrix + np.outer(x, x)) @ y
                  for x in arms.features]
        chosen = AllocationService.greedy_arm(state, y, arms)
        assert values[chosen] == pytest.approx(min(values), rel=1e-10)


class TestRatioArm:
    """Test ratio tracking."""

    def test_direct_ratio_comparison(self):
        """Test T = (3, 1, ...) and p = (1/2, 1/2, 0, ...)."""
        decomposition = AllocationService.l1_decompose(
            np.eye(5)[0] - np.eye(5)[1], ArmSet(features=np.eye(5)))
        assert AllocationService.ratio_arm([3, 1, 0, 0, 0], decomposition) == 1

    def test_all_zero_counts(self):
        """Test that the lowest positive-ratio arm wins at T = 0."""
        decomposition = AllocationService.l1_decompose(
            np.eye(4)[2] - np.eye(4)[3], ArmSet(features=np.eye(4)))
        assert AllocationService.ratio_arm([0, 0, 0, 0], decomposition) == 2

    def test_all_zero_ratio(self):
        """Test the error for an empty support."""
        decomposition = Decomposition(direction=np.zeros(2), weights=np.zeros(2),
                                      ratio=np.zeros(2), rho=0.0)
        with pytest.raises(AllocationError):
            AllocationService.ratio_arm([1, 1], decomposition)

    def test_long_run_tracking(self, setting_one):
        """Test T_a / t -> p*_a for the tracking rule."""
        arms = setting_one.arms
        decomposition = AllocationService.l1_decompose(arms.direction(0, 5), arms)
        counts = np.zeros(arms.n_arms)
        steps = 10 ** 5
        for _ in range(steps):
            counts[AllocationService.ratio_arm(counts, decomposition)] += 1
        np.testing.assert_allclose(counts / steps, decomposition.ratio, atol=0.01)


class TestDesignGreedyStep:
    """Test the transductive design step."""

    def test_single_direction_reduces_to_greedy(self, rng):
        """Test one unit-weight direction against greedy_arm."""
        arms = ArmSet(features=rng.standard_normal((5, 3)))
        state = LinalgService.new_state(3, 1.0, 5)
        for arm in range(5):
            LinalgService.rank_one_update(state, arms.features[arm], 0.0, arm)
        y = arms.direction(1, 4)
        assert AllocationService.design_greedy_step(state, [(y, 1.0)], arms) == (
            AllocationService.greedy_arm(state, y, arms))

    def test_two_canonical_arms(self):
        """Test the symmetric two-arm case picks the first arm."""
        state = LinalgService.new_state(2, 1.0, 2)
        arms = ArmSet(features=np.eye(2))
        directions = AllocationService.pairwise_directions(arms)
        assert AllocationService.design_greedy_step(state, directions, arms) == 0

    def test_uniform_on_canonical_arms(self):
        """Test 300 steps over all pairs of three canonical arms."""
        arms = ArmSet(features=np.eye(3))
        state = LinalgService.new_state(3, 1.0, 3)
        directions = AllocationService.pairwise_directions(arms)
        for _ in range(300):
            arm = AllocationService.design_greedy_step(state, directions, arms)
            LinalgService.rank_one_update(state, arms.features[arm], 0.0, arm)
        assert all(abs(c - 100) <= 2 for c in state.counts)

    def test_worst_direction_is_served(self):
        """Test an arm helping only one of two tied directions is pulled."""
        arms = ArmSet(features=np.eye(3))
        state = LinalgService.new_state(3, 1.0, 3)
        directions = [(np.array([0.0, 1.0, 0.0]), 1.0),
                      (np.array([0.0, 0.0, 1.0]), 1.0)]
        assert AllocationService.design_greedy_step(state, directions, arms) == 1

    def test_oracle_directions_cycle(self):
        """Test directions sharing the best arm all get pulls."""
        instance = InstanceService.make_setting_two(3, 1.0)
        arms = instance.arms
        directions = AllocationService.oracle_directions(instance, np.ones(3))
        state = LinalgService.new_state(3, 0.01, 3)
        for _ in range(60):
            arm = AllocationService.design_greedy_step(state, directions, arms)
            LinalgService.rank_one_update(state, arms.features[arm], 0.0, arm)
        assert min(state.counts) >= 15

    def test_empty_directions(self):
        """Test rejection of an empty direction set."""
        state = LinalgService.new_state(2, 1.0, 2)
        with pytest.raises(InvalidInputError):
            AllocationService.design_greedy_step(state, [], ArmSet(features=np.eye(2)))

    def test_non_positive_weight(self):
        """Test rejection of a zero weight."""
        state = LinalgService.new_state(2, 1.0, 2)
        with pytest.raises(InvalidInputError):
            AllocationService.design_greedy_step(
                state, [(np.array([1.0, -1.0]), 0.0)], ArmSet(features=np.eye(2)))

    def test_pairwise_directions_active_subset(self):
        """Test directions restricted to active arms."""
        arms = ArmSet(features=np.eye(4))
        directions = AllocationService.pairwise_directions(arms, [3, 1])
        assert len(directions) == 1
        np.testing.assert_array_equal(directions[0][0], [0, 1, 0, -1])

    def test_oracle_directions(self, setting_two):
        """Test directions from the best arm weighted by the gaps."""
        gaps = np.full(5, 0.5)
        directions = AllocationService.oracle_directions(setting_two, gaps)
        assert len(directions) == 4
        assert all(w == 0.5 for _, w in directions)


class TestTieBreaking:
    """Test the shared argmin/argmax helpers."""

    def test_lowest_index_on_ties(self):
        assert argmin_first([2.0, 1.0, 1.0]) == 1
        assert argmax_first([0.0, 3.0, 3.0]) == 1

    def test_relative_tolerance(self):
        """Test that near-equal tiny values still tie."""
        assert argmin_first([1e-10 * (1 + 1e-14), 1e-10]) == 0
        assert argmin_first([1e-10 * (1 + 1e-9), 1e-10]) == 1


def test_setting_one_instance_is_valid():
    """Setting one features span R^d, so every pair is decomposable."""
    instance = InstanceService.make_setting_one(3)
    cache = AllocationService.allocation_cache(instance.arms)
    assert len(cache) == 12
