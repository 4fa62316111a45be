import logging
from typing import Optional

import numpy as np

from app.models.design import DesignState
from app.utils.config import DESIGN_REFRESH_INTERVAL
from app.utils.exceptions import InvalidInputError

# Set up logging
logger = logging.getLogger(__name__)


def _as_vector(x, dim: int, name: str) -> np.ndarray:
    vector = np.asarray(x, dtype=float).reshape(-1)
    if vector.shape[0] != dim:
        raise InvalidInputError(
            f"{name} has length {vector.shape[0]}, expected {dim}")
    if not np.all(np.isfinite(vector)):
        raise InvalidInputError(f"{name} must be finite")
    return vector


class LinalgService:
    """Incremental design-matrix algebra"""

    @staticmethod
    def new_state(dim: int, lam: float, n_arms: int,
                  refresh_interval: Optional[int] = None) -> DesignState:
        """Fresh state with A = lam * I and no observations"""
        if dim < 1:
            raise InvalidInputError("dimension must be positive")
        if not lam > 0:
            raise InvalidInputError(f"lambda must be positive, got {lam}")
        if n_arms < 1:
            raise InvalidInputError("at least one arm is required")

        return DesignState(
            dim=dim,
            lam=float(lam),
            matrix=lam * np.eye(dim),
            inverse=np.eye(dim) / lam,
            log_det=dim * float(np.log(lam)),
            response=np.zeros(dim),
            counts=np.zeros(n_arms, dtype=np.int64),
            refresh_interval=refresh_interval or DESIGN_REFRESH_INTERVAL
        )

    @staticmethod
    def rank_one_update(state: DesignState, x, r: float,
                        arm: int) -> DesignState:
        """
        Add one observation (x, r) of `arm`.
        The inverse follows Sherman-Morrison and the log-determinant grows by
        log(1 + x^T A^{-1} x), both using the pre-update inverse.
        """
        x = _as_vector(x, state.dim, "feature")
        if not np.isfinite(r):
            raise InvalidInputError("reward must be finite")
        if not 0 <= arm < state.counts.shape[0]:
            raise InvalidInputError(f"arm index {arm} out of range")

        u = state.inverse @ x
        q = float(x @ u)
        state.matrix += np.outer(x, x)
        state.inverse -= np.outer(u, u) / (1.0 + q)
        state.log_det += float(np.log1p(q))
        state.response += r * x
        state.round += 1
        state.counts[arm] += 1
        state.updates_since_refresh += 1

        if state.updates_since_refresh >= state.refresh_interval:
            LinalgService.refresh(state)
        return state

    @staticmethod
    def refresh(state: DesignState) -> DesignState:
        """Recompute inverse and log-determinant densely from the matrix"""
        sign, log_det = np.linalg.slogdet(state.matrix)
        if sign <= 0:
            raise InvalidInputError("design matrix is not positive definite")

        drift = abs(log_det - state.log_det)
        state.inverse = np.linalg.inv(state.matrix)
        # Keep the inverse exactly symmetric
        state.inverse = (state.inverse + state.inverse.T) / 2.0
        state.log_det = float(log_det)
        state.updates_since_refresh = 0
        logger.debug(
            f"Refreshed design state at round {state.round}, "
            f"log-det drift {drift:.3e}")
        return state

    @staticmethod
    def weighted_norm(state: DesignState, y) -> float:
        """||y||_{A^{-1}}"""
        y = _as_vector(y, state.dim, "direction")
        return float(np.sqrt(max(float(y @ state.inverse @ y), 0.0)))

    @staticmethod
    def norm_if_added(state: DesignState, x_candidate, y) -> float:
        """y^T (A + x x^T)^{-1} y without touching the state (squared norm)"""
        x = _as_vector(x_candidate, state.dim, "candidate")
        y = _as_vector(y, state.dim, "direction")
        u = state.inverse @ x
        current = float(y @ state.inverse @ y)
        correction = float(y @ u) ** 2 / (1.0 + float(x @ u))
        return max(current - correction, 0.0)

    @staticmethod
    def norms_if_added(state: DesignState, features: np.ndarray,
                       directions: np.ndarray) -> np.ndarray:
        """
        Squared norms y^T (A + x_a x_a^T)^{-1} y for every direction (rows of
        `directions`) and every candidate arm (rows of `features`).
        Returns an array of shape (n_directions, n_arms).
        """
        directions = np.atleast_2d(directions)
        mx = features @ state.inverse                # (K, d), rows M x_a
        q = np.einsum("kd,kd->k", mx, features)      # x_a^T M x_a
        current = np.einsum("nd,de,ne->n", directions, state.inverse,
                            directions)
        cross = directions @ mx.T                    # (n, K), y^T M x_a
        return np.maximum(current[:, None] - cross ** 2 / (1.0 + q)[None, :],
                          0.0)

    @staticmethod
    def log_det_bound(dim: int, lam: float, rounds: int,
                      max_norm: float) -> float:
        """Determinant growth bound d * log(lam + t L^2 / d)"""
        return dim * float(np.log(lam + rounds * max_norm ** 2 / dim))
