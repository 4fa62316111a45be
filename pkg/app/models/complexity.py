from enum import Enum
from typing import List

from pydantic import BaseModel, Field


class BoundRegime(str, Enum):
    """Which sample-complexity bound applies for the given lambda"""
    SMALL_LAMBDA = "small-lambda"
    LARGE_LAMBDA = "large-lambda"
    NO_GUARANTEE = "no-guarantee"


class BoundParameters(BaseModel):
    """Problem constants entering the stopping-time bound"""
    R: float = Field(..., gt=0.0)
    S: float = Field(..., gt=0.0)
    K: int = Field(..., ge=2)
    d: int = Field(..., ge=1)
    L: float = Field(..., gt=0.0)
    lam: float = Field(..., gt=0.0)
    delta: float = Field(..., gt=0.0, lt=1.0)


class ComplexityReport(BaseModel):
    """Closed-form complexities of one instance"""
    gaps: List[float]
    best_arm: int
    epsilon: float
    h_epsilon: float
    h_zero: float
    h_oracle: float
    h_oracle_prime: float
    theorem3_ok: bool
    regime: BoundRegime
    stopping_bound: float
