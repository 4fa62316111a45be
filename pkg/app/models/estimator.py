from typing import Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.models.design import DesignState


class EstimatorState(BaseModel):
    """Least-squares estimator plus the parameters of its confidence widths"""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    design: DesignState
    R: float = Field(..., gt=0.0)
    S: float = Field(..., gt=0.0)
    delta: float = Field(..., gt=0.0, lt=1.0)
    n_arms: int = Field(..., ge=1)
    # Union-bound multiplier inside the log, K^2 unless overridden
    pair_correction: Optional[float] = Field(None, gt=0.0)

    @model_validator(mode="after")
    def _default_pair_correction(self):
        if self.pair_correction is None:
            self.pair_correction = float(self.n_arms ** 2)
        return self
