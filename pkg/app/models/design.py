import numpy as np
from pydantic import BaseModel, ConfigDict


class DesignState(BaseModel):
    """Regularized design A = lam*I + sum x x^T with its inverse and log-det.

    Single-writer: one run owns one state and mutates it in place.
    """
    model_config = ConfigDict(arbitrary_types_allowed=True)

    dim: int
    lam: float
    matrix: np.ndarray
    inverse: np.ndarray
    log_det: float
    response: np.ndarray
    round: int = 0
    counts: np.ndarray
    refresh_interval: int
    updates_since_refresh: int = 0
