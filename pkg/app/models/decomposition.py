"""
L1-minimal representations of directions in the feature set
"""

from typing import Dict, List, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict

# Arms with p* at or below this are outside the support
SUPPORT_THRESHOLD = 1e-12


class Decomposition(BaseModel):
    """w*, p* and rho for one direction y"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    direction: np.ndarray
    weights: np.ndarray
    ratio: np.ndarray
    rho: float

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.ratio > SUPPORT_THRESHOLD)

    @property
    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.weights)))

    def negated(self) -> "Decomposition":
        """Decomposition of -y, obtained without solving again"""
        return Decomposition(
            direction=-self.direction,
            weights=-self.weights,
            ratio=self.ratio,
            rho=self.rho
        )


class AllocationCache(BaseModel):
    """Decompositions for every ordered pair (i, j), i != j"""
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n_arms: int
    decompositions: Dict[Tuple[int, int], Decomposition]

    def get(self, i: int, j: int) -> Decomposition:
        return self.decompositions[(i, j)]

    def pairs(self) -> List[Tuple[int, int]]:
        return sorted(self.decompositions.keys())

    def __len__(self) -> int:
        return len(self.decompositions)
