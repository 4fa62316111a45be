import logging
from typing import Optional

from app.models.instance import Instance
from app.models.run_record import AlgorithmName, RunRecord
from app.services.algorithms.lingape import Selector, lingape_run
from app.services.algorithms.xy import (
    LAMBDA_STATIC,
    xy_adaptive_run,
    xy_oracle_run,
    xy_static_run,
)
from app.utils.config import DEFAULT_PULL_BUDGET

# Set up logging
logger = logging.getLogger(__name__)


class AlgorithmService:
    """Runs any identification algorithm by name"""

    @staticmethod
    def run_algorithm(name: AlgorithmName, instance: Instance,
                      epsilon: float = 0.0, delta: float = 0.05,
                      lam: float = 1.0,
                      lambda_static: float = LAMBDA_STATIC,
                      seed: int = 0, trace_every: Optional[int] = None,
                      budget: int = DEFAULT_PULL_BUDGET,
                      phase_initial: Optional[int] = None,
                      cache=None) -> RunRecord:
        name = AlgorithmName(name)
        logger.debug(f"Running {name.value} with seed {seed}")
        if name == AlgorithmName.LINGAPE_GREEDY:
            return lingape_run(instance, epsilon, delta, lam,
                               Selector.GREEDY, seed, trace_every, budget)
        if name == AlgorithmName.LINGAPE_RATIO:
            return lingape_run(instance, epsilon, delta, lam,
                               Selector.RATIO, seed, trace_every, budget,
                               cache=cache)
        if name == AlgorithmName.XY_STATIC:
            return xy_static_run(instance, epsilon, delta, lambda_static,
                                 seed, trace_every, budget)
        if name == AlgorithmName.XY_ORACLE:
            return xy_oracle_run(instance, epsilon, delta, lambda_static,
                                 seed, trace_every, budget)
        return xy_adaptive_run(instance, epsilon, delta, lambda_static,
                               phase_initial, seed, trace_every, budget)
