"""
Campaign configuration and outputs
"""

from datetime import datetime
from enum import Enum
from typing import Dict, List, Optional

from pydantic import BaseModel, Field, field_validator, model_validator

from app.models.run_record import AlgorithmName
from app.utils.config import DEFAULT_PULL_BUDGET


class ExperimentKind(str, Enum):
    """Experiment families and what their points mean"""
    SETTING_ONE_SWEEP = "setting_one_sweep"   # points are dimensions d
    SETTING_TWO_SWEEP = "setting_two_sweep"   # points are gaps
    REAL_DATA_SWEEP = "real_data_sweep"       # points are arm counts K
    CUSTOM = "custom"                         # one instance file


class ExperimentConfig(BaseModel):
    """A seeded campaign over experiment points and algorithms"""
    experiment: ExperimentKind
    points: List[float] = Field(default_factory=list)
    algorithms: List[AlgorithmName]
    epsilon: float = Field(0.0, ge=0.0)
    delta: float = Field(0.05, gt=0.0, lt=1.0)
    lam: float = Field(1.0, gt=0.0)
    lambda_static: float = Field(0.01, gt=0.0)
    repetitions: int = Field(1, ge=1)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    budget: int = Field(DEFAULT_PULL_BUDGET, ge=1)
    # Per-algorithm caps that replace `budget` for the named algorithms
    algorithm_budgets: Dict[AlgorithmName, int] = Field(default_factory=dict)
    trace_every: Optional[int] = Field(None, ge=1)
    workers: Optional[int] = Field(None, ge=1)
    phase_initial: Optional[int] = Field(None, ge=1)
    angle: float = Field(0.01, gt=0.0)
    setting_two_dim: int = Field(5, ge=2)
    dataset: Optional[str] = None
    instance_file: Optional[str] = None
    min_gap: float = Field(0.05, ge=0.0)
    lambda_fit: float = Field(0.01, gt=0.0)

    @field_validator("algorithms")
    @classmethod
    def _non_empty(cls, value):
        if not value:
            raise ValueError("at least one algorithm is required")
        return value

    @field_validator("algorithm_budgets")
    @classmethod
    def _positive_budgets(cls, value):
        for algorithm, budget in value.items():
            if budget < 1:
                raise ValueError(f"budget for {algorithm.value} must be positive")
        return value

    def budget_for(self, algorithm: AlgorithmName) -> int:
        return self.algorithm_budgets.get(AlgorithmName(algorithm), self.budget)

    @model_validator(mode="after")
    def _check_points(self):
        if self.experiment == ExperimentKind.CUSTOM:
            if not self.instance_file:
                raise ValueError("custom experiments need instance_file")
            if not self.points:
                self.points = [0.0]
        elif not self.points:
            raise ValueError(f"{self.experiment.value} needs at least one point")
        if self.experiment == ExperimentKind.REAL_DATA_SWEEP and not self.dataset:
            raise ValueError("real_data_sweep needs a dataset")
        return self


class SummaryRow(BaseModel):
    """Aggregate of the runs at one (point, algorithm)"""
    point: float
    algorithm: AlgorithmName
    runs: int
    mean_tau: Optional[float] = None
    min_tau: Optional[int] = None
    max_tau: Optional[int] = None
    error_rate: float = Field(..., ge=0.0, le=1.0)
    inconclusive: int = 0
    mean_counts: List[float] = Field(default_factory=list)


class CampaignManifest(BaseModel):
    """Everything needed to re-run a campaign bit-exactly"""
    figure: Optional[str] = None
    scale: Optional[str] = None
    config: ExperimentConfig
    seeds: Dict[str, int]
    software_version: str
    numpy_version: str
    scipy_version: str
    created_at: datetime
    files: List[str] = Field(default_factory=list)
