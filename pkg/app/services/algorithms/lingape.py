"""
LinGapE: gap-based exploration for linear best-arm identification
"""

import logging
from enum import Enum
from typing import Callable, NamedTuple, Optional

import numpy as np

from app.models.decomposition import AllocationCache, Decomposition
from app.models.estimator import EstimatorState
from app.models.instance import ArmSet, Instance
from app.models.run_record import AlgorithmName, RunRecord
from app.services.algorithms.audit import EventAuditor
from app.services.algorithms.recording import (
    DirectionChoice,
    TraceRecorder,
    build_record,
    check_run_parameters,
)
from app.services.allocation.service import (
    AllocationService,
    argmax_first,
)
from app.services.estimator.service import EstimatorService
from app.services.instances.service import InstanceService
from app.services.linalg.service import LinalgService
from app.utils.config import DEFAULT_PULL_BUDGET
from app.utils.seeding import make_rng

# Set up logging
logger = logging.getLogger(__name__)


class Selector(str, Enum):
    """How LinGapE picks the arm that shrinks the examined gap"""
    GREEDY = "greedy"
    RATIO = "ratio"


class StepSnapshot(NamedTuple):
    """State handed to observers before the next pull (read-only)"""
    t: int
    choice: DirectionChoice
    next_arm: int
    estimator: EstimatorState
    decomposition: Optional[Decomposition]


Observer = Callable[[StepSnapshot], None]


def select_direction(est: EstimatorState, arms: ArmSet) -> DirectionChoice:
    """
    i_t = argmax_i x_i^T theta_hat,
    j_t = argmax_{j != i_t} Delta_hat(j, i_t) + beta(j, i_t),
    B(t) is the maximized value.
    """
    means = arms.features @ EstimatorService.theta_hat(est)
    best = argmax_first(means)
    gaps = means - means[best]
    widths = EstimatorService.widths_against(est, best, arms)
    scores = gaps + widths
    scores[best] = -np.inf
    challenger = argmax_first(scores)
    return DirectionChoice(best=best, challenger=challenger,
                           bound=float(scores[challenger]),
                           width=float(widths[challenger]))


def lingape_run(instance: Instance, epsilon: float = 0.0,
                delta: float = 0.05, lam: float = 1.0,
                selector: Selector = Selector.GREEDY, seed: int = 0,
                trace_every: Optional[int] = None,
                budget: int = DEFAULT_PULL_BUDGET,
                pair_correction: Optional[float] = None,
                cache: Optional[AllocationCache] = None,
                observer: Optional[Observer] = None,
                audit: bool = False) -> RunRecord:
    """
    Pull every arm once, then repeatedly examine the most ambiguous gap
    (i_t, j_t) and pull the arm that best reduces its width, until
    B(t) <= epsilon. Exceeding `budget` pulls gives an inconclusive record.
    """
    selector = Selector(selector)
    arms = instance.arms
    K = arms.n_arms
    check_run_parameters(epsilon, delta, lam, budget, K)

    rng = make_rng(seed)
    state = LinalgService.new_state(arms.dim, lam, K)
    est = EstimatorService.create_state(
        state, instance.R, instance.S, delta, K, pair_correction)
    if selector == Selector.RATIO and cache is None:
        cache = AllocationService.allocation_cache(arms)
    auditor = EventAuditor(instance) if audit else None
    tracer = TraceRecorder(trace_every)

    def pull(arm: int):
        reward = InstanceService.sample_reward(instance, arm, rng)
        LinalgService.rank_one_update(state, arms.features[arm], reward, arm)

    for arm in range(K):
        pull(arm)

    while True:
        choice = select_direction(est, arms)
        if auditor is not None:
            auditor.check(est, choice)

        if choice.bound <= epsilon:
            conclusive = True
            break
        if state.round >= budget:
            conclusive = False
            logger.warning(
                f"LinGapE exhausted its budget of {budget} pulls "
                f"with B(t)={choice.bound:.4g}")
            break

        direction = arms.direction(choice.best, choice.challenger)
        decomposition = None
        if selector == Selector.GREEDY:
            next_arm = AllocationService.greedy_arm(state, direction, arms)
        else:
            decomposition = cache.get(choice.best, choice.challenger)
            if decomposition.support.size == 0:
                # Duplicate features: nothing to track, fall back to greedy
                next_arm = AllocationService.greedy_arm(state, direction, arms)
            else:
                next_arm = AllocationService.ratio_arm(state.counts,
                                                       decomposition)

        tracer.record(state.round, choice, next_arm)
        if observer is not None:
            observer(StepSnapshot(state.round, choice, next_arm, est,
                                  decomposition))
        pull(next_arm)

    tracer.record(state.round, choice, None, force=True)
    algorithm = (AlgorithmName.LINGAPE_GREEDY if selector == Selector.GREEDY
                 else AlgorithmName.LINGAPE_RATIO)
    extra = {}
    if auditor is not None:
        extra["event_held"] = auditor.event_held
        extra["bound_violations"] = auditor.bound_violations

    record = build_record(
        algorithm, instance, state.counts, choice.best, conclusive,
        epsilon, delta, lam, seed, tracer, choice.bound,
        metadata={
            "selector": selector.value,
            "pair_correction": est.pair_correction,
            "budget": budget
        },
        **extra
    )
    logger.debug(f"{algorithm.value} stopped at tau={record.tau} "
                 f"returning arm {record.returned_arm}")
    return record
