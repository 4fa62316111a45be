from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field, model_validator


class AlgorithmName(str, Enum):
    """Runnable identification algorithms"""
    LINGAPE_GREEDY = "lingape_greedy"
    LINGAPE_RATIO = "lingape_ratio"
    XY_STATIC = "xy_static"
    XY_ADAPTIVE = "xy_adaptive"
    XY_ORACLE = "xy_oracle"


class RunStatus(str, Enum):
    """Outcome of a run"""
    CONCLUSIVE = "conclusive"
    INCONCLUSIVE = "inconclusive"


class TraceStep(BaseModel):
    """Snapshot of one round: (t, i_t, j_t, B(t), a_{t+1}, width)"""
    t: int
    best: int
    challenger: int
    bound: float
    next_arm: Optional[int] = None
    width: float


class RunRecord(BaseModel):
    """Result of a single identification run"""
    algorithm: AlgorithmName
    tau: int = Field(..., ge=0)
    returned_arm: int = Field(..., ge=0)
    counts: List[int]
    correct: bool
    status: RunStatus = RunStatus.CONCLUSIVE
    epsilon: float
    delta: float
    lam: float
    seed: int
    trace: Optional[List[TraceStep]] = None
    uses_ground_truth: bool = False
    active_set_sizes: Optional[List[int]] = None
    final_bound: Optional[float] = None
    # Filled only by audited LinGapE runs
    event_held: Optional[bool] = None
    bound_violations: Optional[int] = None
    point: Optional[float] = None
    repetition: Optional[int] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _check_totals(self):
        if sum(self.counts) != self.tau:
            raise ValueError(
                f"pull counts sum to {sum(self.counts)}, tau is {self.tau}")
        if self.returned_arm >= len(self.counts):
            raise ValueError("returned arm is out of range")
        return self

    @property
    def conclusive(self) -> bool:
        return self.status == RunStatus.CONCLUSIVE
