"""
Preset campaigns for the stopping-time figures and the arm-selection table
"""

import logging
import os
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd
import scipy

from app import __version__
from app.models.experiment import (
    CampaignManifest,
    ExperimentConfig,
    ExperimentKind,
    SummaryRow,
)
from app.models.run_record import AlgorithmName, RunRecord
from app.services.bench.service import BenchService, format_point, run_key
from app.utils.config import BENCH_DATASET_PATH
from app.utils.exceptions import DatasetMissingError, InvalidInputError
from app.utils.metrics import CampaignMetrics

# Set up logging
logger = logging.getLogger(__name__)

FIGURES = ("fig1", "fig2", "fig3", "table1")
SCALES = ("ci", "full")

SUMMARY_COLUMNS = ["point", "algorithm", "mean_tau", "min_tau", "max_tau",
                   "error_rate", "inconclusive"]

# Scaled-down presets use a wider angle in setting one so runs take seconds
CI_ANGLE = 0.1
FULL_ANGLE = 0.01
# Pull cap for XY-adaptive in scaled-down setting one sweeps. Runs that
# reach it are reported inconclusive
CI_ADAPTIVE_BUDGET = 300_000

PRESETS: Dict[str, Dict[str, Dict[str, Any]]] = {
    "fig1": {
        "ci": {"points": [2, 3], "angle": CI_ANGLE, "repetitions": 3,
               "algorithm_budgets": {AlgorithmName.XY_ADAPTIVE: CI_ADAPTIVE_BUDGET}},
        "full": {"points": [2, 3, 4, 5, 6], "angle": FULL_ANGLE,
                 "repetitions": 10},
    },
    "fig2": {
        "ci": {"points": [2.0, 1.0, 0.5], "repetitions": 3},
        "full": {"points": [2.0, 1.0, 0.5, 0.3, 0.2, 0.1],
                 "repetitions": 10},
    },
    "fig3": {
        "ci": {"points": [10, 20], "repetitions": 3},
        "full": {"points": [5, 10, 15, 20, 25, 30], "repetitions": 10},
    },
    "table1": {
        "ci": {"points": [5], "angle": CI_ANGLE, "repetitions": 1},
        "full": {"points": [5], "angle": FULL_ANGLE, "repetitions": 1},
    },
}

EXPERIMENTS = {
    "fig1": (ExperimentKind.SETTING_ONE_SWEEP,
             [AlgorithmName.LINGAPE_GREEDY, AlgorithmName.XY_STATIC,
              AlgorithmName.XY_ADAPTIVE, AlgorithmName.XY_ORACLE]),
    "fig2": (ExperimentKind.SETTING_TWO_SWEEP,
             [AlgorithmName.LINGAPE_GREEDY, AlgorithmName.XY_STATIC]),
    "fig3": (ExperimentKind.REAL_DATA_SWEEP,
             [AlgorithmName.LINGAPE_GREEDY, AlgorithmName.XY_STATIC]),
    "table1": (ExperimentKind.SETTING_ONE_SWEEP,
               [AlgorithmName.LINGAPE_GREEDY, AlgorithmName.XY_STATIC,
                AlgorithmName.XY_ORACLE]),
}


class ReproduceService:
    """Builds preset campaigns and writes their result files"""

    @staticmethod
    def preset_config(figure: str, scale: str = "ci",
                      dataset: Optional[str] = None,
                      overrides: Optional[Dict[str, Any]] = None
                      ) -> ExperimentConfig:
        if figure not in FIGURES:
            raise InvalidInputError(
                f"Unknown figure {figure!r}, expected one of {FIGURES}")
        if scale not in SCALES:
            raise InvalidInputError(
                f"Unknown scale {scale!r}, expected one of {SCALES}")

        experiment, algorithms = EXPERIMENTS[figure]
        values: Dict[str, Any] = {
            "experiment": experiment,
            "algorithms": algorithms,
            "epsilon": 0.0,
            "delta": 0.05,
            "lam": 1.0,
            "lambda_static": 0.01,
            "seed": 0,
        }
        values.update(PRESETS[figure][scale])

        if experiment == ExperimentKind.REAL_DATA_SWEEP:
            dataset = dataset or BENCH_DATASET_PATH
            if not dataset or not os.path.exists(dataset):
                raise DatasetMissingError(
                    f"{figure} needs a feature/outcome table. Generate one "
                    f"with `surrogate-data --rows 100000 --dim 36 --out "
                    f"table.csv` and pass --dataset table.csv "
                    f"(or set BENCH_DATASET_PATH)")
            values["dataset"] = dataset

        values.update({k: v for k, v in (overrides or {}).items()
                       if v is not None})
        return ExperimentConfig(**values)

    @staticmethod
    def write_summary(rows: List[SummaryRow], path: str) -> str:
        frame = pd.DataFrame(
            [{**row.model_dump(include=set(SUMMARY_COLUMNS)),
              "point": format_point(row.point),
              "algorithm": row.algorithm.value} for row in rows],
            columns=SUMMARY_COLUMNS)
        frame.to_csv(path, index=False)
        return path

    @staticmethod
    def write_counts_table(records: List[RunRecord], path: str) -> str:
        """Per-arm pull counts of the first repetition, arms labelled 1..K"""
        first = [r for r in records if r.repetition == 0]
        if not first:
            raise InvalidInputError("no records for the counts table")
        n_arms = len(first[0].counts)
        table = {"arm": np.arange(1, n_arms + 1)}
        for record in first:
            table[record.algorithm.value] = record.counts
        pd.DataFrame(table).to_csv(path, index=False)
        return path

    @staticmethod
    def write_manifest(config: ExperimentConfig, records: List[RunRecord],
                       path: str, files: List[str],
                       figure: Optional[str] = None,
                       scale: Optional[str] = None) -> str:
        manifest = CampaignManifest(
            figure=figure,
            scale=scale,
            config=config,
            seeds={run_key(r.point, r.algorithm, r.repetition): r.seed
                   for r in records},
            software_version=__version__,
            numpy_version=np.__version__,
            scipy_version=scipy.__version__,
            created_at=datetime.now(timezone.utc),
            files=files
        )
        with open(path, "w", encoding="utf-8") as f:
            f.write(manifest.model_dump_json(indent=2))
        return path

    @staticmethod
    def write_campaign(config: ExperimentConfig, records: List[RunRecord],
                       metrics: CampaignMetrics, output_dir: str,
                       name: str, figure: Optional[str] = None,
                       scale: Optional[str] = None) -> List[str]:
        """Summary CSV, manifest.json and metrics.prom in `output_dir`"""
        os.makedirs(output_dir, exist_ok=True)
        rows = BenchService.summarize(records)
        files = [ReproduceService.write_summary(
            rows, os.path.join(output_dir, f"{name}.csv"))]
        if figure == "table1":
            files.append(ReproduceService.write_counts_table(
                records, os.path.join(output_dir, "table1_counts.csv")))

        metrics_path = os.path.join(output_dir, "metrics.prom")
        metrics.write(metrics_path)
        files.append(metrics_path)

        manifest_path = os.path.join(output_dir, "manifest.json")
        ReproduceService.write_manifest(
            config, records, manifest_path,
            [os.path.basename(f) for f in files], figure, scale)
        files.append(manifest_path)
        logger.info(f"Wrote {len(files)} files to {output_dir}")
        return files

    @staticmethod
    def reproduce(figure: str, scale: str = "ci", output_dir: str = "results",
                  dataset: Optional[str] = None,
                  overrides: Optional[Dict[str, Any]] = None) -> List[str]:
        """Run a preset campaign and write its files under output_dir/figure"""
        config = ReproduceService.preset_config(figure, scale, dataset,
                                                overrides)
        logger.info(f"Reproducing {figure} at {scale} scale")
        metrics = CampaignMetrics()
        records = BenchService.run_batch(config, metrics)
        return ReproduceService.write_campaign(
            config, records, metrics, os.path.join(output_dir, figure),
            figure, figure, scale)
