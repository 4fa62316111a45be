import logging
import math
from typing import Optional

import numpy as np
from pydantic import ValidationError

from app.models.dataset import FeatureOutcomeTable
from app.models.instance import (
    BEST_ARM_TOLERANCE,
    ArmSet,
    Instance,
    NoiseKind,
    NoiseModel,
)
from app.utils.exceptions import ConstructionError, InvalidInputError

# Set up logging
logger = logging.getLogger(__name__)

# Construction of instances from feature/outcome tables
REAL_DATA_LAMBDA = 0.01
REAL_DATA_MIN_GAP = 0.05
MAX_CONSTRUCTION_RETRIES = 1000


def round_up_significant(value: float, digits: int = 2) -> float:
    """Round a positive value up to `digits` significant figures"""
    if value <= 0:
        return value
    exponent = math.floor(math.log10(value)) - digits + 1
    scale = 10.0 ** exponent
    rounded = math.ceil(value / scale - 1e-9) * scale
    # Guard against the subtraction above rounding below the value
    return rounded if rounded >= value else rounded + scale


class InstanceService:
    """Builds bandit instances and samples their rewards"""

    @staticmethod
    def create_instance(features, theta, noise: NoiseModel, R: float,
                        S: float, name: Optional[str] = None) -> Instance:
        """Validate and build an Instance, reporting failures as rejected input"""
        try:
            return Instance(
                arms=ArmSet(features=features),
                theta=theta,
                noise=noise,
                R=R,
                S=S,
                name=name
            )
        except ValidationError as e:
            messages = "; ".join(err["msg"] for err in e.errors())
            raise InvalidInputError(f"Invalid instance: {messages}")

    @staticmethod
    def sample_reward(instance: Instance, arm: int,
                      rng: np.random.Generator) -> float:
        """Draw one reward of `arm`"""
        if not 0 <= arm < instance.n_arms:
            raise InvalidInputError(f"arm index {arm} out of range")

        mean = float(instance.arms.features[arm] @ instance.theta)
        if instance.noise.kind == NoiseKind.SIGNFLIP:
            return 1.0 if rng.random() < (1.0 + mean) / 2.0 else -1.0
        return mean + instance.noise.sigma * float(rng.standard_normal())

    @staticmethod
    def make_setting_one(d: int, angle: float = 0.01) -> Instance:
        """
        Canonical bases plus one extra arm at `angle` from e_1,
        theta = 2 e_1, gaussian noise with sigma 1.
        The extra arm is nearly as good as the best one, and pulling e_2
        is what resolves the gap.
        """
        if d < 2:
            raise InvalidInputError(f"setting one needs d >= 2, got {d}")
        if not 0 < angle < math.pi / 2:
            raise InvalidInputError(f"angle must be in (0, pi/2), got {angle}")

        extra = np.zeros(d)
        extra[0] = math.cos(angle)
        extra[1] = math.sin(angle)
        features = np.vstack([np.eye(d), extra])
        theta = np.zeros(d)
        theta[0] = 2.0

        return InstanceService.create_instance(
            features, theta, NoiseModel.gaussian(1.0), R=1.0, S=2.0,
            name=f"setting_one(d={d}, angle={angle})")

    @staticmethod
    def make_setting_two(d: int, delta: float) -> Instance:
        """Canonical bases with theta = delta e_1: every gap equals delta"""
        if d < 2:
            raise InvalidInputError(f"setting two needs d >= 2, got {d}")
        if not delta > 0:
            raise InvalidInputError(f"gap must be positive, got {delta}")

        theta = np.zeros(d)
        theta[0] = delta
        return InstanceService.create_instance(
            np.eye(d), theta, NoiseModel.gaussian(1.0), R=1.0, S=float(delta),
            name=f"setting_two(d={d}, gap={delta})")

    @staticmethod
    def fit_ridge(table: FeatureOutcomeTable,
                  lambda_fit: float = REAL_DATA_LAMBDA) -> np.ndarray:
        """Regularized least-squares fit of theta on the whole table"""
        if not lambda_fit > 0:
            raise InvalidInputError("lambda_fit must be positive")
        X = table.features
        gram = X.T @ X + lambda_fit * np.eye(table.dim)
        return np.linalg.solve(gram, X.T @ table.outcomes)

    @staticmethod
    def build_real_instance(table: FeatureOutcomeTable, k: int,
                            lambda_fit: float = REAL_DATA_LAMBDA,
                            min_gap: float = REAL_DATA_MIN_GAP,
                            rng: Optional[np.random.Generator] = None,
                            max_retries: int = MAX_CONSTRUCTION_RETRIES
                            ) -> Instance:
        """
        Fit theta* on the table, then sample k rows as arms until every
        non-best gap is at least `min_gap`. Rewards are sign flips with
        success probability (1 + x^T theta*) / 2.
        """
        if k < 2:
            raise InvalidInputError(f"k must be at least 2, got {k}")
        if k > table.n_rows:
            raise InvalidInputError(
                f"k={k} exceeds the {table.n_rows} rows of the table")
        if min_gap < 0:
            raise InvalidInputError("min_gap must be nonnegative")
        rng = rng if rng is not None else np.random.default_rng()

        theta = InstanceService.fit_ridge(table, lambda_fit)
        means = table.features @ theta
        offending = np.flatnonzero(np.abs(means) > 1.0)
        if offending.size:
            row = int(offending[0])
            raise ConstructionError(
                f"Row {row} has fitted mean {means[row]:.6f} outside [-1, 1]; "
                f"sign-flip rewards are undefined")

        S = round_up_significant(float(np.linalg.norm(theta)))
        if S == 0:
            raise ConstructionError("Fitted theta is zero")

        for attempt in range(1, max_retries + 1):
            rows = rng.choice(table.n_rows, size=k, replace=False)
            sampled = means[rows]
            ordered = np.sort(sampled)
            if ordered[-1] - ordered[-2] <= BEST_ARM_TOLERANCE:
                continue
            if ordered[-1] - ordered[-2] < min_gap:
                continue
            logger.debug(f"Real-data instance accepted after {attempt} draws")
            return InstanceService.create_instance(
                table.features[rows], theta, NoiseModel.signflip(),
                R=2.0, S=S, name=f"real_data(k={k})")

        raise ConstructionError(
            f"No sample of {k} arms with gaps >= {min_gap} "
            f"after {max_retries} draws")
