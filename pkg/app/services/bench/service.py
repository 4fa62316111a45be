"""
Campaign orchestration: seeded batches and their aggregation
"""

import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, List, NamedTuple, Optional, Tuple

import numpy as np

from app.models.experiment import ExperimentConfig, ExperimentKind, SummaryRow
from app.models.instance import Instance
from app.models.run_record import AlgorithmName, RunRecord
from app.services.algorithms.service import AlgorithmService
from app.services.bench.config_file import load_instance
from app.services.datasets.service import DatasetService
from app.services.instances.service import InstanceService
from app.utils.config import get_worker_count
from app.utils.exceptions import (
    BatchAbortedError,
    InvalidInputError,
    LinBanditError,
)
from app.utils.metrics import CampaignMetrics
from app.utils.seeding import derive_seed, make_rng

# Set up logging
logger = logging.getLogger(__name__)


class RunTask(NamedTuple):
    """One (point, algorithm, repetition) cell of a campaign"""
    point: float
    algorithm: AlgorithmName
    repetition: int
    seed: int


def format_point(point: float) -> str:
    return str(int(point)) if float(point).is_integer() else repr(float(point))


def run_key(point: float, algorithm: AlgorithmName, repetition: int) -> str:
    return f"{format_point(point)}:{AlgorithmName(algorithm).value}:{repetition}"


def _execute(task: RunTask, instance: Instance,
             config: ExperimentConfig) -> Tuple[RunRecord, float]:
    """Run one task; module level so worker processes can unpickle it"""
    started = time.perf_counter()
    record = AlgorithmService.run_algorithm(
        task.algorithm, instance,
        epsilon=config.epsilon,
        delta=config.delta,
        lam=config.lam,
        lambda_static=config.lambda_static,
        seed=task.seed,
        trace_every=config.trace_every,
        budget=config.budget_for(task.algorithm),
        phase_initial=config.phase_initial
    )
    record = record.model_copy(update={"point": task.point,
                                       "repetition": task.repetition})
    return record, time.perf_counter() - started


def _execute_packed(args) -> Tuple[RunRecord, float]:
    return _execute(*args)


class BenchService:
    """Runs and summarizes campaigns"""

    @staticmethod
    def plan(config: ExperimentConfig) -> List[RunTask]:
        """All tasks of a campaign in point, repetition, algorithm order"""
        return [
            RunTask(point, algorithm, repetition,
                    derive_seed(config.seed, format_point(point),
                                algorithm.value, repetition))
            for point in config.points
            for repetition in range(config.repetitions)
            for algorithm in config.algorithms
        ]

    @staticmethod
    def build_instance(config: ExperimentConfig, point: float,
                       repetition: int, table=None) -> Instance:
        """The instance shared by every algorithm at (point, repetition)"""
        if config.experiment == ExperimentKind.SETTING_ONE_SWEEP:
            return InstanceService.make_setting_one(int(point), config.angle)
        if config.experiment == ExperimentKind.SETTING_TWO_SWEEP:
            return InstanceService.make_setting_two(config.setting_two_dim,
                                                    float(point))
        if config.experiment == ExperimentKind.REAL_DATA_SWEEP:
            if table is None:
                table = DatasetService.load_table(config.dataset)
            rng = make_rng(derive_seed(config.seed, "instance",
                                       format_point(point), repetition))
            return InstanceService.build_real_instance(
                table, int(point), config.lambda_fit, config.min_gap, rng)
        return load_instance(config.instance_file)

    @staticmethod
    def build_instances(config: ExperimentConfig
                        ) -> Dict[Tuple[float, int], Instance]:
        table = None
        if config.experiment == ExperimentKind.REAL_DATA_SWEEP:
            table = DatasetService.load_table(config.dataset)

        instances = {}
        for point in config.points:
            for repetition in range(config.repetitions):
                try:
                    instances[(point, repetition)] = BenchService.build_instance(
                        config, point, repetition, table)
                except LinBanditError as e:
                    logger.error(f"Batch aborted at point {point}: {e.detail}")
                    raise BatchAbortedError(format_point(point), e.detail)
        return instances

    @staticmethod
    def run_batch(config: ExperimentConfig,
                  metrics: Optional[CampaignMetrics] = None
                  ) -> List[RunRecord]:
        """
        Run every (point, algorithm, repetition) of the campaign.
        Records come back in plan order whatever the worker count.
        """
        tasks = BenchService.plan(config)
        instances = BenchService.build_instances(config)
        workers = config.workers or get_worker_count()
        logger.info(f"🚀 Running {len(tasks)} runs of "
                    f"{config.experiment.value} on {workers} worker(s)")

        jobs = [(task, instances[(task.point, task.repetition)], config)
                for task in tasks]
        try:
            if workers > 1 and len(jobs) > 1:
                with ProcessPoolExecutor(max_workers=workers) as executor:
                    results = list(executor.map(_execute_packed, jobs))
            else:
                results = [_execute_packed(job) for job in jobs]
        except LinBanditError as e:
            logger.error(f"Batch failed: {e.detail}")
            raise BatchAbortedError("unknown", e.detail)

        records = []
        for record, duration in results:
            if metrics is not None:
                metrics.track_run(record.algorithm.value, record.status.value,
                                  record.tau, duration)
            if not record.conclusive:
                key = run_key(record.point, record.algorithm,
                              record.repetition)
                logger.warning(f"Run {key} was inconclusive after {record.tau} pulls")
            records.append(record)

        logger.info(f"✅ Finished {len(records)} runs")
        return records

    @staticmethod
    def summarize(records: List[RunRecord]) -> List[SummaryRow]:
        """
        One row per (point, algorithm), in order of first appearance.
        Stopping times and error rates use conclusive runs only.
        """
        if not records:
            raise InvalidInputError("no records to summarize")

        groups: Dict[Tuple[float, AlgorithmName], List[RunRecord]] = {}
        for record in records:
            point = record.point if record.point is not None else 0.0
            groups.setdefault((point, record.algorithm), []).append(record)

        rows = []
        for (point, algorithm), group in groups.items():
            conclusive = [r for r in group if r.conclusive]
            stats = {"error_rate": 0.0}
            if conclusive:
                taus = np.array([r.tau for r in conclusive])
                stats = {
                    "mean_tau": float(np.mean(taus)),
                    "min_tau": int(np.min(taus)),
                    "max_tau": int(np.max(taus)),
                    "error_rate": float(
                        np.mean([not r.correct for r in conclusive])),
                    "mean_counts": np.mean(
                        np.array([r.counts for r in conclusive], dtype=float),
                        axis=0).tolist()
                }
            rows.append(SummaryRow(
                point=point,
                algorithm=algorithm,
                runs=len(group),
                inconclusive=len(group) - len(conclusive),
                **stats
            ))
        return rows
