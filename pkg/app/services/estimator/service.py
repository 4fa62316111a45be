import logging
import math

import numpy as np
from pydantic import ValidationError

from app.models.design import DesignState
from app.models.estimator import EstimatorState
from app.models.instance import ArmSet
from app.services.linalg.service import LinalgService
from app.utils.exceptions import InvalidInputError

# Set up logging
logger = logging.getLogger(__name__)


def _check_index(index: int, arms: ArmSet):
    if not 0 <= index < arms.n_arms:
        raise InvalidInputError(
            f"arm index {index} out of range for {arms.n_arms} arms")


class EstimatorService:
    """Least-squares estimate of theta and its confidence widths"""

    @staticmethod
    def create_state(design: DesignState, R: float, S: float, delta: float,
                     n_arms: int, pair_correction: float = None
                     ) -> EstimatorState:
        try:
            return EstimatorState(design=design, R=R, S=S, delta=delta,
                                  n_arms=n_arms,
                                  pair_correction=pair_correction)
        except ValidationError as e:
            messages = "; ".join(err["msg"] for err in e.errors())
            raise InvalidInputError(f"Invalid estimator parameters: {messages}")

    @staticmethod
    def theta_hat(est: EstimatorState) -> np.ndarray:
        """theta_hat = A^{-1} b"""
        return est.design.inverse @ est.design.response

    @staticmethod
    def confidence_scale(est: EstimatorState) -> float:
        """
        C_t = R sqrt(2 log(pair_correction det(A)^{1/2} det(lam I)^{-1/2} / delta))
              + sqrt(lam) S
        """
        design = est.design
        half_log_ratio = 0.5 * (design.log_det - design.dim * math.log(design.lam))
        inner = (math.log(est.pair_correction) + half_log_ratio
                 - math.log(est.delta))
        return (est.R * math.sqrt(2.0 * max(inner, 0.0))
                + math.sqrt(design.lam) * est.S)

    @staticmethod
    def confidence_scale_bound(est: EstimatorState, rounds: int,
                               max_norm: float) -> float:
        """Upper bound on C_t after `rounds` pulls of features with norm <= L"""
        design = est.design
        inner = (2.0 * math.log(est.pair_correction / est.delta)
                 + design.dim * math.log(
                     1.0 + rounds * max_norm ** 2 / (design.lam * design.dim)))
        return est.R * math.sqrt(max(inner, 0.0)) + math.sqrt(design.lam) * est.S

    @staticmethod
    def gap_estimate(est: EstimatorState, i: int, j: int,
                     arms: ArmSet) -> float:
        """Estimated gap (x_i - x_j)^T theta_hat"""
        _check_index(i, arms)
        _check_index(j, arms)
        if i == j:
            return 0.0
        return float(arms.direction(i, j) @ EstimatorService.theta_hat(est))

    @staticmethod
    def gap_width(est: EstimatorState, i: int, j: int, arms: ArmSet) -> float:
        """beta_t(i, j) = ||x_i - x_j||_{A^{-1}} C_t"""
        _check_index(i, arms)
        _check_index(j, arms)
        if i == j:
            return 0.0
        return (LinalgService.weighted_norm(est.design, arms.direction(i, j))
                * EstimatorService.confidence_scale(est))

    @staticmethod
    def gaps_against(est: EstimatorState, i: int, arms: ArmSet) -> np.ndarray:
        """Vector of estimated gaps (x_j - x_i)^T theta_hat over all j"""
        _check_index(i, arms)
        means = arms.features @ EstimatorService.theta_hat(est)
        return means - means[i]

    @staticmethod
    def widths_against(est: EstimatorState, i: int, arms: ArmSet) -> np.ndarray:
        """Vector of beta_t(j, i) over all j"""
        _check_index(i, arms)
        directions = arms.features - arms.features[i]
        quad = np.einsum("kd,de,ke->k", directions, est.design.inverse,
                         directions)
        return (np.sqrt(np.maximum(quad, 0.0))
                * EstimatorService.confidence_scale(est))

    @staticmethod
    def static_width(design: DesignState, y, sigma: float, n_arms: int,
                     n: int, delta: float) -> float:
        """
        Fixed-sequence width
        2 sigma ||y||_{A^{-1}} sqrt(2 log(6 n^2 K / (delta pi^2))).
        """
        if n < 1:
            raise InvalidInputError(f"n must be at least 1, got {n}")
        if not 0 < delta < 1:
            raise InvalidInputError(f"delta must be in (0, 1), got {delta}")
        if sigma < 0:
            raise InvalidInputError("sigma must be nonnegative")
        log_term = math.log(6.0 * n * n * n_arms / (delta * math.pi ** 2))
        return (2.0 * sigma * LinalgService.weighted_norm(design, y)
                * math.sqrt(2.0 * max(log_term, 0.0)))

    @staticmethod
    def static_widths(design: DesignState, directions: np.ndarray,
                      sigma: float, n_arms: int, n: int,
                      delta: float) -> np.ndarray:
        """static_width for each row of `directions`"""
        if n < 1:
            raise InvalidInputError(f"n must be at least 1, got {n}")
        log_term = math.log(6.0 * n * n * n_arms / (delta * math.pi ** 2))
        quad = np.einsum("kd,de,ke->k", directions, design.inverse, directions)
        return (2.0 * sigma * np.sqrt(np.maximum(quad, 0.0))
                * math.sqrt(2.0 * max(log_term, 0.0)))
