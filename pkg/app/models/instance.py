"""
Bandit instance models
"""

from enum import Enum
from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Two arms count as tied for best below this separation
BEST_ARM_TOLERANCE = 1e-12


class NoiseKind(str, Enum):
    """Reward noise models"""
    GAUSSIAN = "gaussian"
    SIGNFLIP = "signflip"


class NoiseModel(BaseModel):
    """Noise model of an instance"""
    model_config = ConfigDict(frozen=True)

    kind: NoiseKind = NoiseKind.GAUSSIAN
    sigma: float = Field(1.0, ge=0.0)

    @classmethod
    def gaussian(cls, sigma: float) -> "NoiseModel":
        return cls(kind=NoiseKind.GAUSSIAN, sigma=sigma)

    @classmethod
    def signflip(cls) -> "NoiseModel":
        return cls(kind=NoiseKind.SIGNFLIP, sigma=0.0)


class ArmSet(BaseModel):
    """Feature set X = (x_1, ..., x_K), one row per arm"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    features: np.ndarray

    @field_validator("features", mode="before")
    @classmethod
    def _as_matrix(cls, value):
        features = np.array(value, dtype=float)
        if features.ndim != 2:
            raise ValueError("features must be a K x d matrix")
        if features.shape[0] < 2:
            raise ValueError("at least two arms are required")
        if features.shape[1] < 1:
            raise ValueError("features must have at least one coordinate")
        if not np.all(np.isfinite(features)):
            raise ValueError("features must be finite")
        features.setflags(write=False)
        return features

    @property
    def n_arms(self) -> int:
        return self.features.shape[0]

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def max_norm(self) -> float:
        """L = max_i ||x_i||_2"""
        return float(np.max(np.linalg.norm(self.features, axis=1)))

    def direction(self, i: int, j: int) -> np.ndarray:
        """y(i, j) = x_i - x_j"""
        return self.features[i] - self.features[j]


class Instance(BaseModel):
    """Ground truth of a linear bandit problem"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    arms: ArmSet
    theta: np.ndarray
    noise: NoiseModel = NoiseModel()
    R: float = Field(..., gt=0.0)
    S: float = Field(..., gt=0.0)
    name: Optional[str] = None

    @field_validator("theta", mode="before")
    @classmethod
    def _as_vector(cls, value):
        theta = np.array(value, dtype=float).reshape(-1)
        if not np.all(np.isfinite(theta)):
            raise ValueError("theta must be finite")
        theta.setflags(write=False)
        return theta

    @model_validator(mode="after")
    def _check_ground_truth(self):
        if self.theta.shape[0] != self.arms.dim:
            raise ValueError(
                f"theta has length {self.theta.shape[0]}, "
                f"features have dimension {self.arms.dim}")
        if np.linalg.norm(self.theta) > self.S * (1 + 1e-12):
            raise ValueError("||theta|| exceeds S")

        means = self.arms.features @ self.theta
        if self.noise.kind == NoiseKind.GAUSSIAN:
            if self.R < self.noise.sigma:
                raise ValueError("R must be at least sigma for gaussian noise")
        else:
            if self.R < 2.0:
                raise ValueError("sign-flip rewards are 2-sub-Gaussian, R >= 2")
            worst = int(np.argmax(np.abs(means)))
            if abs(means[worst]) > 1.0:
                raise ValueError(
                    f"arm {worst} has mean {means[worst]:.6f} outside [-1, 1]")

        ordered = np.sort(means)
        if ordered[-1] - ordered[-2] <= BEST_ARM_TOLERANCE:
            raise ValueError("best arm is not unique")
        return self

    @property
    def n_arms(self) -> int:
        return self.arms.n_arms

    @property
    def dim(self) -> int:
        return self.arms.dim

    @property
    def means(self) -> np.ndarray:
        """Expected rewards x_i^T theta"""
        return self.arms.features @ self.theta

    @property
    def best_arm(self) -> int:
        return int(np.argmax(self.means))
