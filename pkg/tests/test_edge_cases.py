import numpy as np
import pytest

from app.models.instance import ArmSet, NoiseModel
from app.models.run_record import AlgorithmName
from app.services.algorithms.lingape import Selector, lingape_run
from app.services.algorithms.service import AlgorithmService
from app.services.allocation.service import AllocationService
from app.services.complexity.service import ComplexityService
from app.services.instances.service import InstanceService
from app.utils.exceptions import InfeasibleDirectionError, InvalidInputError


class TestDegenerateFeatures:
    """Test feature sets that are not in general position."""

    def test_duplicate_arms_have_empty_decomposition(self):
        arms = ArmSet(features=[[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
        cache = AllocationService.allocation_cache(arms)
        assert cache.get(1, 2).support.size == 0
        assert cache.get(1, 2).rho == 0.0

    def test_ratio_run_with_duplicate_arms(self):
        """Test the ratio selector on a pair of identical arms."""
        instance = InstanceService.create_instance(
            [[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]], [1.0, 0.0],
            NoiseModel.gaussian(1.0), R=1.0, S=1.0)
        record = lingape_run(instance, selector=Selector.RATIO, seed=4)
        assert record.conclusive
        assert record.returned_arm == 0

    def test_rank_deficient_features(self):
        """Test arms spanning a line in the plane."""
        instance = InstanceService.create_instance(
            [[1.0, 1.0], [0.5, 0.5], [-1.0, -1.0]], [0.5, 0.5],
            NoiseModel.gaussian(1.0), R=1.0, S=1.0)
        record = lingape_run(instance, seed=1)
        assert record.correct

        with pytest.raises(InfeasibleDirectionError):
            AllocationService.l1_decompose([1.0, -1.0], instance.arms)

    def test_one_dimensional_arms(self):
        instance = InstanceService.create_instance(
            [[1.0], [0.2], [-1.0]], [1.0], NoiseModel.gaussian(1.0),
            R=1.0, S=1.0)
        for name in AlgorithmName:
            record = AlgorithmService.run_algorithm(name, instance, seed=2)
            assert record.correct


class TestBoundaryParameters:
    """Test parameters at the edge of their ranges."""

    def test_two_arms_complexity(self):
        instance = InstanceService.make_setting_two(2, 1.0)
        report = ComplexityService.report(instance)
        assert report.gaps == [1.0, 1.0]
        assert report.h_oracle == report.h_oracle_prime

    def test_large_regularization(self):
        instance = InstanceService.make_setting_two(2, 1.0)
        record = lingape_run(instance, lam=100.0, seed=0)
        assert record.conclusive

    def test_tiny_delta(self):
        instance = InstanceService.make_setting_two(2, 2.0)
        loose = lingape_run(instance, delta=0.5, seed=0)
        strict = lingape_run(instance, delta=1e-9, seed=0)
        assert strict.tau >= loose.tau

    def test_epsilon_with_signflip_rewards(self, rng):
        features = np.array([[0.5, 0.0], [0.0, 0.5], [0.3, 0.3]])
        instance = InstanceService.create_instance(
            features, [1.0, 0.2], NoiseModel.signflip(), R=2.0, S=1.1)
        record = lingape_run(instance, epsilon=0.2, seed=3)
        assert record.conclusive
        assert record.correct

    def test_out_of_range_arm(self, setting_two, rng):
        with pytest.raises(InvalidInputError):
            InstanceService.sample_reward(setting_two, 5, rng)
