"""
Problem complexities and the LinGapE stopping-time bound
"""

import logging
import math
from typing import Optional, Tuple

import numpy as np

from app.models.complexity import BoundParameters, BoundRegime, ComplexityReport
from app.models.decomposition import AllocationCache
from app.models.instance import BEST_ARM_TOLERANCE, Instance
from app.services.allocation.service import AllocationService
from app.utils.exceptions import InvalidInputError

# Set up logging
logger = logging.getLogger(__name__)

# H_0 <= ORACLE_RATIO_FACTOR * H'_oracle for every instance
ORACLE_RATIO_FACTOR = 72.0


class ComplexityService:
    """Closed-form complexity calculators"""

    @staticmethod
    def instance_gaps(instance: Instance) -> Tuple[np.ndarray, int]:
        """
        Delta_i = (x_{a*} - x_i)^T theta for i != a*, and
        Delta_{a*} = min_{j != a*} (x_{a*} - x_j)^T theta.
        """
        means = instance.means
        best = int(np.argmax(means))
        gaps = means[best] - means
        others = np.delete(gaps, best)
        if np.min(others) <= BEST_ARM_TOLERANCE:
            raise InvalidInputError("best arm is not unique")
        gaps[best] = float(np.min(others))
        return gaps, best

    @staticmethod
    def h_epsilon(instance: Instance, epsilon: float,
                  cache: Optional[AllocationCache] = None) -> float:
        """
        H_eps = sum_k max_{i,j} p*_k(y(i,j)) rho(y(i,j))
                / max(eps, (eps + Delta_i)/3, (eps + Delta_j)/3)^2
        """
        if epsilon < 0:
            raise InvalidInputError("epsilon must be nonnegative")
        if cache is None:
            cache = AllocationService.allocation_cache(instance.arms)
        gaps, _ = ComplexityService.instance_gaps(instance)

        per_arm = np.zeros(instance.n_arms)
        for i, j in cache.pairs():
            if j < i:
                # p* and rho are the same for (i, j) and (j, i)
                continue
            decomposition = cache.get(i, j)
            scale = max(epsilon, (epsilon + gaps[i]) / 3.0,
                        (epsilon + gaps[j]) / 3.0)
            per_arm = np.maximum(
                per_arm, decomposition.ratio * decomposition.rho / scale ** 2)
        return float(np.sum(per_arm))

    @staticmethod
    def oracle_complexity(instance: Instance,
                          cache: Optional[AllocationCache] = None
                          ) -> Tuple[float, float]:
        """(H_oracle, H'_oracle) from rho(y(a*, i)) / Delta_i^2"""
        if cache is None:
            cache = AllocationService.allocation_cache(instance.arms)
        gaps, best = ComplexityService.instance_gaps(instance)
        terms = np.array([cache.get(best, i).rho / gaps[i] ** 2
                          for i in range(instance.n_arms) if i != best])
        return float(np.max(terms)), float(np.sum(terms))

    @staticmethod
    def theorem2_bound(h: float,
                       params: BoundParameters) -> Tuple[float, BoundRegime]:
        """Stopping-time bound and the lambda regime it was derived under"""
        if not h > 0:
            raise InvalidInputError(f"complexity must be positive, got {h}")
        R2 = params.R ** 2
        log_term = math.log(params.K ** 2 / params.delta)

        small_lambda = params.lam <= 2.0 * R2 / params.S ** 2 * log_term
        large_lambda = params.lam > 4.0 * h * R2 * params.L ** 2

        if large_lambda and not small_lambda:
            bound = 2.0 * (4.0 * h * R2 * log_term
                           + 2.0 * h * params.lam * params.S ** 2 + params.K)
            return bound, BoundRegime.LARGE_LAMBDA

        N = 8.0 * h * R2 * log_term + params.K
        M = 2.0 * math.sqrt(16.0 * h ** 2 * R2 ** 2 * params.d * params.L ** 2
                            / params.lam + N ** 2)
        C = params.K + 4.0 * h * R2 * params.d * math.log(
            1.0 + M ** 2 * params.L ** 2 / (params.lam * params.d))
        bound = 8.0 * h * R2 * log_term + C

        if small_lambda:
            return bound, BoundRegime.SMALL_LAMBDA
        return bound, BoundRegime.NO_GUARANTEE

    @staticmethod
    def report(instance: Instance, epsilon: float = 0.0, lam: float = 1.0,
               delta: float = 0.05,
               cache: Optional[AllocationCache] = None) -> ComplexityReport:
        """All complexities of an instance in one report"""
        if cache is None:
            cache = AllocationService.allocation_cache(instance.arms)
        gaps, best = ComplexityService.instance_gaps(instance)
        h_zero = ComplexityService.h_epsilon(instance, 0.0, cache)
        h_eps = (h_zero if epsilon == 0
                 else ComplexityService.h_epsilon(instance, epsilon, cache))
        h_oracle, h_oracle_prime = ComplexityService.oracle_complexity(
            instance, cache)

        params = BoundParameters(
            R=instance.R, S=instance.S, K=instance.n_arms, d=instance.dim,
            L=instance.arms.max_norm, lam=lam, delta=delta)
        bound, regime = ComplexityService.theorem2_bound(h_eps, params)

        theorem3_ok = h_zero <= ORACLE_RATIO_FACTOR * h_oracle_prime * (1 + 1e-12)
        if not theorem3_ok:
            logger.error(f"H_0={h_zero:.6g} exceeds "
                         f"{ORACLE_RATIO_FACTOR:g} * H'_oracle={h_oracle_prime:.6g}")

        return ComplexityReport(
            gaps=[float(g) for g in gaps],
            best_arm=best,
            epsilon=epsilon,
            h_epsilon=h_eps,
            h_zero=h_zero,
            h_oracle=h_oracle,
            h_oracle_prime=h_oracle_prime,
            theorem3_ok=theorem3_ok,
            regime=regime,
            stopping_bound=bound
        )
