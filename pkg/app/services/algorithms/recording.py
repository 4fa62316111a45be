from typing import List, NamedTuple, Optional

import numpy as np

from app.models.instance import Instance
from app.models.run_record import (
    AlgorithmName,
    RunRecord,
    RunStatus,
    TraceStep,
)
from app.utils.exceptions import InvalidInputError


class DirectionChoice(NamedTuple):
    """Gap examined in one round: best arm, challenger, B(t) and its width"""
    best: int
    challenger: int
    bound: float
    width: float


class TraceRecorder:
    """Keeps every N-th step of a run; disabled when `every` is None"""

    def __init__(self, every: Optional[int]):
        if every is not None and every < 1:
            raise InvalidInputError("trace sampling interval must be positive")
        self.every = every
        self.steps: List[TraceStep] = []

    @property
    def enabled(self) -> bool:
        return self.every is not None

    def record(self, t: int, choice: DirectionChoice,
               next_arm: Optional[int] = None, force: bool = False):
        if not self.enabled:
            return
        if force or t % self.every == 0:
            if self.steps and self.steps[-1].t == t:
                return
            self.steps.append(TraceStep(
                t=t,
                best=choice.best,
                challenger=choice.challenger,
                bound=choice.bound,
                next_arm=next_arm,
                width=choice.width
            ))

    def result(self) -> Optional[List[TraceStep]]:
        return self.steps if self.enabled else None


def check_run_parameters(epsilon: float, delta: float, lam: float,
                         budget: int, n_arms: int):
    if epsilon < 0:
        raise InvalidInputError(f"epsilon must be nonnegative, got {epsilon}")
    if not 0 < delta < 1:
        raise InvalidInputError(f"delta must be in (0, 1), got {delta}")
    if not lam > 0:
        raise InvalidInputError(f"lambda must be positive, got {lam}")
    if budget < n_arms:
        raise InvalidInputError(
            f"budget {budget} is below the {n_arms} initialization pulls")


def build_record(algorithm: AlgorithmName, instance: Instance,
                 counts: np.ndarray, returned_arm: int, conclusive: bool,
                 epsilon: float, delta: float, lam: float, seed: int,
                 tracer: TraceRecorder, final_bound: Optional[float],
                 **extra) -> RunRecord:
    """Assemble a RunRecord and score it against the ground truth"""
    means = instance.means
    shortfall = float(means[instance.best_arm] - means[returned_arm])
    return RunRecord(
        algorithm=algorithm,
        tau=int(np.sum(counts)),
        returned_arm=int(returned_arm),
        counts=[int(c) for c in counts],
        correct=shortfall <= epsilon,
        status=RunStatus.CONCLUSIVE if conclusive else RunStatus.INCONCLUSIVE,
        epsilon=epsilon,
        delta=delta,
        lam=lam,
        seed=int(seed),
        trace=tracer.result(),
        final_bound=final_bound,
        **extra
    )
