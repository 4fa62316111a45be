import logging

import numpy as np

from app.models.estimator import EstimatorState
from app.models.instance import Instance
from app.services.algorithms.recording import DirectionChoice
from app.services.complexity.service import ComplexityService
from app.services.estimator.service import EstimatorService

# Set up logging
logger = logging.getLogger(__name__)

AUDIT_TOLERANCE = 1e-9


class EventAuditor:
    """
    Checks a LinGapE run against the ground truth.
    The confidence event requires |Delta(i, j) - Delta_hat(i, j)| <= beta(i, j)
    for every pair at every round. While it holds, B(t) must respect
    B <= min(0, -max(Delta_i, Delta_j) + c beta) + beta with c = 1 when the
    best arm is examined and c = 2 otherwise.
    """

    def __init__(self, instance: Instance):
        self.instance = instance
        self.features = instance.arms.features
        self.true_means = instance.means
        self.gaps, self.best_arm = ComplexityService.instance_gaps(instance)
        self.event_held = True
        self.bound_violations = 0
        self.steps = 0

    def pair_widths(self, est: EstimatorState) -> np.ndarray:
        """K x K matrix of beta(i, j)"""
        gram = self.features @ est.design.inverse @ self.features.T
        diag = np.diag(gram)
        quad = diag[:, None] + diag[None, :] - 2.0 * gram
        return (np.sqrt(np.maximum(quad, 0.0))
                * EstimatorService.confidence_scale(est))

    def event_holds(self, est: EstimatorState) -> bool:
        estimated = self.features @ EstimatorService.theta_hat(est)
        true_gaps = self.true_means[:, None] - self.true_means[None, :]
        estimated_gaps = estimated[:, None] - estimated[None, :]
        errors = np.abs(true_gaps - estimated_gaps)
        widths = self.pair_widths(est)
        return bool(np.all(errors <= widths + AUDIT_TOLERANCE))

    def bound_limit(self, choice: DirectionChoice) -> float:
        i, j = choice.best, choice.challenger
        beta = choice.width
        factor = 1.0 if self.best_arm in (i, j) else 2.0
        worst = max(self.gaps[i], self.gaps[j])
        return min(0.0, -worst + factor * beta) + beta

    def check(self, est: EstimatorState, choice: DirectionChoice):
        self.steps += 1
        if not self.event_held:
            return
        if not self.event_holds(est):
            self.event_held = False
            logger.debug(f"Confidence event failed at round {est.design.round}")
            return

        limit = self.bound_limit(choice)
        if choice.bound > limit + AUDIT_TOLERANCE * (1.0 + abs(limit)):
            self.bound_violations += 1
            logger.warning(
                f"B(t)={choice.bound:.6g} exceeds its bound {limit:.6g} "
                f"at round {est.design.round}")
