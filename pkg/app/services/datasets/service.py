"""
Feature/outcome tables: file format, validation and the surrogate generator
"""

import logging
import os
from typing import Optional, Tuple

import numpy as np
import pandas as pd
from pydantic import ValidationError

from app.models.dataset import FeatureOutcomeTable
from app.utils.exceptions import ConstructionError, InvalidInputError

# Set up logging
logger = logging.getLogger(__name__)

OUTCOME_COLUMN = "outcome"
FACTOR_DIM = 6
SURROGATE_THETA_NORM = 0.8


def feature_columns(dim: int):
    return [f"f{i}" for i in range(1, dim + 1)]


class DatasetService:
    """Reads, writes and synthesizes FeatureOutcomeTables"""

    @staticmethod
    def build_table(features, outcomes) -> FeatureOutcomeTable:
        try:
            return FeatureOutcomeTable(features=features, outcomes=outcomes)
        except ValidationError as e:
            messages = "; ".join(err["msg"] for err in e.errors())
            raise InvalidInputError(f"Invalid table: {messages}")

    @staticmethod
    def load_table(path: str) -> FeatureOutcomeTable:
        """
        Load a table with header f1..fd,outcome.
        Files ending in .tsv are tab separated, everything else uses commas.
        """
        if not os.path.exists(path):
            raise ConstructionError(f"Table not found: {path}")

        sep = "\t" if path.endswith(".tsv") else ","
        frame = pd.read_csv(path, sep=sep)
        if OUTCOME_COLUMN not in frame.columns:
            raise ConstructionError(
                f"Table {path} has no '{OUTCOME_COLUMN}' column")

        expected = feature_columns(frame.shape[1] - 1)
        columns = [c for c in frame.columns if c != OUTCOME_COLUMN]
        if columns != expected:
            raise ConstructionError(
                f"Table {path} must have columns "
                f"{expected[0]}..{expected[-1]} before '{OUTCOME_COLUMN}'")

        bad = ~frame[OUTCOME_COLUMN].isin([-1, 1])
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise ConstructionError(
                f"Row {row} of {path} has outcome "
                f"{frame[OUTCOME_COLUMN].iloc[row]!r}, expected -1 or +1")

        table = DatasetService.build_table(
            frame[expected].to_numpy(dtype=float),
            frame[OUTCOME_COLUMN].to_numpy(dtype=float))
        logger.info(f"Loaded {table.n_rows} rows of dimension {table.dim} "
                    f"from {path}")
        return table

    @staticmethod
    def save_table(table: FeatureOutcomeTable, path: str) -> str:
        frame = pd.DataFrame(table.features, columns=feature_columns(table.dim))
        frame[OUTCOME_COLUMN] = table.outcomes.astype(int)
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        frame.to_csv(path, index=False)
        logger.info(f"Wrote {table.n_rows} rows to {path}")
        return path

    @staticmethod
    def surrogate_theta(dim: int, rng: np.random.Generator) -> np.ndarray:
        theta = rng.standard_normal(dim)
        return SURROGATE_THETA_NORM * theta / np.linalg.norm(theta)

    @staticmethod
    def generate_surrogate(rows: int, dim: int = FACTOR_DIM ** 2,
                           seed: Optional[int] = None
                           ) -> Tuple[FeatureOutcomeTable, np.ndarray]:
        """
        Synthetic stand-in for click logs.
        With dim = 36 each feature is the Kronecker product of two random
        6-dim unit vectors (article and user), so ||x|| = 1; other dims use
        random unit vectors. Outcomes are sign flips with success
        probability (1 + x^T theta0) / 2 where ||theta0|| = 0.8.
        Returns the table and theta0.
        """
        if rows < 1:
            raise InvalidInputError("rows must be positive")
        if dim < 1:
            raise InvalidInputError("dim must be positive")
        rng = np.random.default_rng(seed)

        if dim == FACTOR_DIM ** 2:
            articles = rng.standard_normal((rows, FACTOR_DIM))
            users = rng.standard_normal((rows, FACTOR_DIM))
            articles /= np.linalg.norm(articles, axis=1, keepdims=True)
            users /= np.linalg.norm(users, axis=1, keepdims=True)
            # Row-wise Kronecker product
            features = np.einsum("ni,nj->nij", articles, users).reshape(rows, dim)
        else:
            features = rng.standard_normal((rows, dim))
            features /= np.linalg.norm(features, axis=1, keepdims=True)

        theta0 = DatasetService.surrogate_theta(dim, rng)
        success = (1.0 + features @ theta0) / 2.0
        outcomes = np.where(rng.random(rows) < success, 1.0, -1.0)
        logger.info(f"Generated surrogate table with {rows} rows, dim {dim}")
        return DatasetService.build_table(features, outcomes), theta0
