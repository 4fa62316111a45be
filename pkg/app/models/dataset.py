import numpy as np
from pydantic import BaseModel, ConfigDict, field_validator, model_validator


class FeatureOutcomeTable(BaseModel):
    """Rows of (feature vector, +/-1 outcome) used to fit a ground truth"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    features: np.ndarray
    outcomes: np.ndarray

    @field_validator("features", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        features = np.array(value, dtype=float)
        if features.ndim != 2 or features.shape[0] == 0:
            raise ValueError("table must have at least one row")
        if not np.all(np.isfinite(features)):
            raise ValueError("features must be finite")
        return features

    @field_validator("outcomes", mode="before")
    @classmethod
    def _as_outcomes(cls, value):
        outcomes = np.array(value, dtype=float).reshape(-1)
        if not np.all(np.isin(outcomes, (-1.0, 1.0))):
            raise ValueError("outcomes must be -1 or +1")
        return outcomes

    @model_validator(mode="after")
    def _check_rows(self):
        if self.features.shape[0] != self.outcomes.shape[0]:
            raise ValueError("features and outcomes have different row counts")
        return self

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]
