"""
Optimal pull ratios and next-arm selectors
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from app.models.decomposition import (
    SUPPORT_THRESHOLD,
    AllocationCache,
    Decomposition,
)
from app.models.design import DesignState
from app.models.instance import ArmSet, Instance
from app.services.linalg.service import LinalgService
from app.utils.exceptions import (
    AllocationError,
    InfeasibleDirectionError,
    InvalidInputError,
)

# Set up logging
logger = logging.getLogger(__name__)

# Relative tolerance for ties in every argmin/argmax
TIE_TOLERANCE = 1e-12
# Largest residual accepted for y = sum w_k x_k
FEASIBILITY_TOLERANCE = 1e-8
# Weights below this (relative to ||y||_1) are solver noise
WEIGHT_CLEANUP = 1e-12

Direction = Tuple[np.ndarray, float]


def argmin_first(values: np.ndarray) -> int:
    """Lowest index whose value is within the tie tolerance of the minimum"""
    values = np.asarray(values, dtype=float)
    best = float(np.min(values))
    threshold = best + TIE_TOLERANCE * abs(best)
    return int(np.flatnonzero(values <= threshold)[0])


def argmax_first(values: np.ndarray) -> int:
    """Lowest index whose value is within the tie tolerance of the maximum"""
    values = np.asarray(values, dtype=float)
    best = float(np.max(values))
    threshold = best - TIE_TOLERANCE * abs(best)
    return int(np.flatnonzero(values >= threshold)[0])


def _decomposition_from_weights(y: np.ndarray,
                                weights: np.ndarray) -> Decomposition:
    l1 = float(np.sum(np.abs(weights)))
    if l1 > 0:
        ratio = np.abs(weights) / l1
    else:
        ratio = np.zeros_like(weights)
    return Decomposition(direction=y, weights=weights, ratio=ratio,
                         rho=l1 ** 2)


class AllocationService:
    """L1-minimal decompositions and the arm selection rules built on them"""

    @staticmethod
    def l1_decompose(y, arms: ArmSet) -> Decomposition:
        """
        Solve min sum |w_k| s.t. sum w_k x_k = y.
        Each w_k is split into nonnegative parts w+ - w-, giving an LP with
        2K variables and d equality constraints.
        """
        y = np.asarray(y, dtype=float).reshape(-1)
        if y.shape[0] != arms.dim:
            raise InvalidInputError(
                f"direction has length {y.shape[0]}, expected {arms.dim}")
        if not np.all(np.isfinite(y)):
            raise InvalidInputError("direction must be finite")

        K = arms.n_arms
        if not np.any(y):
            return _decomposition_from_weights(y, np.zeros(K))

        features_t = arms.features.T
        result = linprog(
            c=np.ones(2 * K),
            A_eq=np.hstack([features_t, -features_t]),
            b_eq=y,
            bounds=(0, None),
            method="highs-ds"
        )

        if result.status != 0:
            least_squares = np.linalg.lstsq(features_t, y, rcond=None)[0]
            residual = float(np.linalg.norm(features_t @ least_squares - y))
            if residual > FEASIBILITY_TOLERANCE:
                raise InfeasibleDirectionError(residual)
            logger.error(f"Linear program failed on a feasible direction: "
                         f"{result.message}")
            raise AllocationError(f"Linear program failed: {result.message}")

        weights = result.x[:K] - result.x[K:]
        weights[np.abs(weights) <= WEIGHT_CLEANUP * np.sum(np.abs(y))] = 0.0

        # Re-solve on a basic support so the representation is exact
        support = np.flatnonzero(weights)
        if support.size <= arms.dim:
            weights = AllocationService._polish(features_t, y, weights, support)

        return _decomposition_from_weights(y, weights)

    @staticmethod
    def _polish(features_t, y, weights, support):
        polished = np.zeros_like(weights)
        polished[support] = np.linalg.lstsq(
            features_t[:, support], y, rcond=None)[0]
        if (np.max(np.abs(features_t @ polished - y))
                < np.max(np.abs(features_t @ weights - y))
                and np.all(np.sign(polished[support]) == np.sign(weights[support]))):
            return polished
        return weights

    @staticmethod
    def allocation_cache(arms: ArmSet) -> AllocationCache:
        """Decompositions of y(i, j) for all ordered pairs i != j"""
        decompositions: Dict[Tuple[int, int], Decomposition] = {}
        for i in range(arms.n_arms):
            for j in range(i + 1, arms.n_arms):
                decomposition = AllocationService.l1_decompose(
                    arms.direction(i, j), arms)
                decompositions[(i, j)] = decomposition
                decompositions[(j, i)] = decomposition.negated()
        logger.debug(f"Cached {len(decompositions)} decompositions "
                     f"for {arms.n_arms} arms")
        return AllocationCache(n_arms=arms.n_arms,
                               decompositions=decompositions)

    @staticmethod
    def greedy_arm(state: DesignState, y, arms: ArmSet) -> int:
        """argmin_a y^T (A + x_a x_a^T)^{-1} y"""
        y = np.asarray(y, dtype=float).reshape(1, -1)
        values = LinalgService.norms_if_added(state, arms.features, y)[0]
        return argmin_first(values)

    @staticmethod
    def ratio_arm(counts, decomposition: Decomposition) -> int:
        """argmin over the support of T_a / p*_a"""
        counts = np.asarray(counts, dtype=float)
        support = decomposition.support
        if support.size == 0:
            raise AllocationError("Decomposition has an all-zero ratio")
        values = counts[support] / decomposition.ratio[support]
        return int(support[argmin_first(values)])

    @staticmethod
    def design_greedy_step(state: DesignState,
                           directions: Sequence[Direction],
                           arms: ArmSet) -> int:
        """
        One greedy step of the transductive design
        min max_(y, w) y^T A^{-1} y / w^2.

        The step works on the direction with the largest current value and
        pulls the arm that lowers it most. Ties go to the arm with the
        smallest total over all directions, then to the lowest index.
        Ranking candidates on the maximum alone never pulls an arm that
        helps only one of several tied directions.
        """
        if len(directions) == 0:
            raise InvalidInputError("at least one direction is required")
        Y = np.vstack([np.asarray(y, dtype=float) for y, _ in directions])
        weights = np.array([w for _, w in directions], dtype=float)
        if np.any(weights <= 0):
            raise InvalidInputError("direction weights must be positive")
        scale = (weights ** 2)[:, None]

        current = np.einsum("nd,de,ne->n", Y, state.inverse, Y) / scale[:, 0]
        target = argmax_first(current)
        after = LinalgService.norms_if_added(state, arms.features,
                                             Y[target:target + 1])[0]
        best = float(np.min(after))
        tied = np.flatnonzero(after <= best + TIE_TOLERANCE * abs(best))
        if tied.size == 1:
            return int(tied[0])

        totals = np.sum(
            LinalgService.norms_if_added(state, arms.features[tied], Y) / scale,
            axis=0)
        return int(tied[argmin_first(totals)])

    @staticmethod
    def pairwise_directions(arms: ArmSet,
                            active: Optional[Sequence[int]] = None
                            ) -> List[Direction]:
        """All differences x_i - x_j between active arms, unit weight"""
        active = list(range(arms.n_arms)) if active is None else sorted(active)
        return [(arms.direction(i, j), 1.0)
                for n, i in enumerate(active) for j in active[n + 1:]]

    @staticmethod
    def oracle_directions(instance: Instance,
                          gaps: np.ndarray) -> List[Direction]:
        """Directions x_{a*} - x_i weighted by the true gaps"""
        best = instance.best_arm
        return [(instance.arms.direction(best, i), float(gaps[i]))
                for i in range(instance.n_arms) if i != best]
