"""
XY-family baselines: static, adaptive and oracle transductive designs
"""

import logging
import math
from typing import List, Optional, Protocol, Sequence

import numpy as np

from app.models.design import DesignState
from app.models.instance import ArmSet, Instance
from app.models.run_record import AlgorithmName, RunRecord
from app.services.algorithms.recording import (
    DirectionChoice,
    TraceRecorder,
    build_record,
    check_run_parameters,
)
from app.services.allocation.service import (
    AllocationService,
    Direction,
    argmax_first,
)
from app.services.complexity.service import ComplexityService
from app.services.estimator.service import EstimatorService
from app.services.instances.service import InstanceService
from app.services.linalg.service import LinalgService
from app.utils.config import DEFAULT_PULL_BUDGET
from app.utils.exceptions import InvalidInputError
from app.utils.seeding import make_rng

# Set up logging
logger = logging.getLogger(__name__)

LAMBDA_STATIC = 0.01
# Minimum phase length is PHASE_FACTOR * d pulls
PHASE_FACTOR = 10


class StoppingRule(Protocol):
    def __call__(self, state: DesignState, arms: ArmSet, sigma: float,
                 delta: float) -> DirectionChoice:
        ...


def static_separation(state: DesignState, arms: ArmSet, sigma: float,
                      delta: float) -> DirectionChoice:
    """
    For the empirical best arm i, B = max_{j != i} Delta_hat(j, i) + w(i, j)
    with w the fixed-sequence width. Stopping when B <= epsilon means every
    competitor is separated from i.
    """
    theta = state.inverse @ state.response
    means = arms.features @ theta
    best = argmax_first(means)
    directions = arms.features - arms.features[best]
    widths = EstimatorService.static_widths(
        state, directions, sigma, arms.n_arms, max(state.round, 1), delta)
    scores = means - means[best] + widths
    scores[best] = -np.inf
    challenger = argmax_first(scores)
    return DirectionChoice(best=best, challenger=challenger,
                           bound=float(scores[challenger]),
                           width=float(widths[challenger]))


def _design_run(algorithm: AlgorithmName, instance: Instance,
                directions: Sequence[Direction], epsilon: float,
                delta: float, lambda_static: float, seed: int,
                trace_every: Optional[int], budget: int,
                stopping_rule: StoppingRule, **extra) -> RunRecord:
    """Greedy design over fixed directions with a confidence-separation stop"""
    arms = instance.arms
    check_run_parameters(epsilon, delta, lambda_static, budget, 1)
    rng = make_rng(seed)
    state = LinalgService.new_state(arms.dim, lambda_static, arms.n_arms)
    tracer = TraceRecorder(trace_every)
    sigma = instance.R
    choice = None

    while True:
        if state.round >= 1:
            choice = stopping_rule(state, arms, sigma, delta)
            if choice.bound <= epsilon:
                conclusive = True
                break
        if state.round >= budget:
            conclusive = False
            logger.warning(f"{algorithm.value} exhausted its budget of "
                           f"{budget} pulls")
            break

        arm = AllocationService.design_greedy_step(state, directions, arms)
        if choice is not None:
            tracer.record(state.round, choice, arm)
        reward = InstanceService.sample_reward(instance, arm, rng)
        LinalgService.rank_one_update(state, arms.features[arm], reward, arm)

    tracer.record(state.round, choice, None, force=True)
    return build_record(
        algorithm, instance, state.counts, choice.best, conclusive,
        epsilon, delta, lambda_static, seed, tracer, choice.bound,
        metadata={"lambda_static": lambda_static, "sigma": sigma,
                  "budget": budget},
        **extra
    )


def xy_static_run(instance: Instance, epsilon: float = 0.0,
                  delta: float = 0.05, lambda_static: float = LAMBDA_STATIC,
                  seed: int = 0, trace_every: Optional[int] = None,
                  budget: int = DEFAULT_PULL_BUDGET,
                  stopping_rule: StoppingRule = static_separation
                  ) -> RunRecord:
    """Fixed design over all pairwise directions"""
    directions = AllocationService.pairwise_directions(instance.arms)
    return _design_run(AlgorithmName.XY_STATIC, instance, directions,
                       epsilon, delta, lambda_static, seed, trace_every,
                       budget, stopping_rule)


def xy_oracle_run(instance: Instance, epsilon: float = 0.0,
                  delta: float = 0.05, lambda_static: float = LAMBDA_STATIC,
                  seed: int = 0, trace_every: Optional[int] = None,
                  budget: int = DEFAULT_PULL_BUDGET,
                  stopping_rule: StoppingRule = static_separation
                  ) -> RunRecord:
    """Design over x_{a*} - x_i weighted by the true gaps Delta_i"""
    gaps, _ = ComplexityService.instance_gaps(instance)
    directions = AllocationService.oracle_directions(instance, gaps)
    return _design_run(AlgorithmName.XY_ORACLE, instance, directions,
                       epsilon, delta, lambda_static, seed, trace_every,
                       budget, stopping_rule, uses_ground_truth=True)


def phase_length(phase: int, dim: int, initial: Optional[int] = None) -> int:
    """max(10 d, ceil(n0 2^(phase-1))) with n0 = 10 d by default"""
    if phase < 1:
        raise InvalidInputError("phases are numbered from 1")
    n0 = initial if initial is not None else PHASE_FACTOR * dim
    return max(PHASE_FACTOR * dim, math.ceil(n0 * 2 ** (phase - 1)))


def surviving_arms(state: DesignState, arms: ArmSet, sigma: float,
                   delta: float) -> List[int]:
    """
    Arms x that no x' beats by more than the fixed-sequence width.
    All K arms are examined, so arms dropped earlier may come back.
    """
    n = max(state.round, 1)
    means = arms.features @ (state.inverse @ state.response)
    survivors = []
    for x in range(arms.n_arms):
        directions = arms.features - arms.features[x]
        widths = EstimatorService.static_widths(
            state, directions, sigma, arms.n_arms, n, delta)
        if not np.any(means - means[x] > widths):
            survivors.append(x)
    return survivors


def xy_adaptive_run(instance: Instance, epsilon: float = 0.0,
                    delta: float = 0.05,
                    lambda_static: float = LAMBDA_STATIC,
                    phase_initial: Optional[int] = None, seed: int = 0,
                    trace_every: Optional[int] = None,
                    budget: int = DEFAULT_PULL_BUDGET,
                    stopping_rule: StoppingRule = static_separation
                    ) -> RunRecord:
    """
    Phased design: each phase starts from a fresh design matrix and targets
    the differences between currently active arms. The active set is
    recomputed at phase end from that phase's observations only.
    """
    arms = instance.arms
    K = arms.n_arms
    check_run_parameters(epsilon, delta, lambda_static, budget, 1)
    rng = make_rng(seed)
    tracer = TraceRecorder(trace_every)
    sigma = instance.R
    counts = np.zeros(K, dtype=np.int64)
    active = list(range(K))
    active_sizes = [K]
    phase = 1
    choice = None
    conclusive = None

    while conclusive is None:
        state = LinalgService.new_state(arms.dim, lambda_static, K)
        directions = AllocationService.pairwise_directions(arms, active)
        length = phase_length(phase, arms.dim, phase_initial)
        logger.debug(f"Phase {phase}: {len(active)} active arms, "
                     f"{length} pulls")

        for _ in range(length):
            if state.round >= 1:
                choice = stopping_rule(state, arms, sigma, delta)
                if choice.bound <= epsilon:
                    conclusive = True
                    break
            if counts.sum() >= budget:
                conclusive = False
                logger.warning(f"xy_adaptive exhausted its budget of "
                               f"{budget} pulls")
                break

            arm = AllocationService.design_greedy_step(state, directions, arms)
            if choice is not None:
                tracer.record(int(counts.sum()), choice, arm)
            reward = InstanceService.sample_reward(instance, arm, rng)
            LinalgService.rank_one_update(state, arms.features[arm], reward,
                                          arm)
            counts[arm] += 1

        if conclusive is not None:
            break

        choice = stopping_rule(state, arms, sigma, delta)
        active = surviving_arms(state, arms, sigma, delta)
        active_sizes.append(len(active))
        if choice.bound <= epsilon:
            conclusive = True
        elif len(active) == 1:
            conclusive = True
            choice = choice._replace(best=active[0])
        phase += 1

    tracer.record(int(counts.sum()), choice, None, force=True)
    return build_record(
        AlgorithmName.XY_ADAPTIVE, instance, counts, choice.best,
        conclusive, epsilon, delta, lambda_static, seed, tracer,
        choice.bound, active_set_sizes=active_sizes,
        metadata={"lambda_static": lambda_static, "sigma": sigma,
                  "budget": budget, "phases": phase}
    )
