import numpy as np
import pytest
from sqlalchemy import create_engine
from sqlalchemy.orm import sessionmaker

from app.databases.results import Base, create_tables
from app.models.instance import NoiseModel
from app.services.datasets.service import DatasetService
from app.services.instances.service import InstanceService
from app.services.linalg.service import LinalgService


@pytest.fixture
def rng():
    """Seeded random stream for test data."""
    return np.random.default_rng(20240601)


@pytest.fixture
def fresh_state():
    """A = I in two dimensions, two arms."""
    return LinalgService.new_state(2, 1.0, 2)


@pytest.fixture
def setting_one():
    """Setting one with d = 5 and the narrow angle."""
    return InstanceService.make_setting_one(5)


@pytest.fixture
def setting_two():
    """Canonical arms, d = K = 5, all gaps 0.5."""
    return InstanceService.make_setting_two(5, 0.5)


@pytest.fixture
def make_random_instance():
    """Factory for random unit-feature instances with a unique best arm."""
    def factory(rng, d, K, R=1.0):
        while True:
            features = rng.standard_normal((K, d))
            features /= np.linalg.norm(features, axis=1, keepdims=True)
            # Make sure the features span R^d
            features[:d] += 0.5 * np.eye(d)
            theta = rng.standard_normal(d)
            means = np.sort(features @ theta)
            if means[-1] - means[-2] > 1e-3:
                return InstanceService.create_instance(
                    features, theta, NoiseModel.gaussian(R), R=R,
                    S=float(np.linalg.norm(theta)) + 1e-9)
    return factory


@pytest.fixture(scope="session")
def surrogate_table():
    """Small surrogate click table with its generating parameter."""
    return DatasetService.generate_surrogate(4000, 36, seed=11)


@pytest.fixture
def db_session(tmp_path):
    """Fresh SQLite results database for each test."""
    engine = create_engine(f"sqlite:///{tmp_path / 'results.db'}",
                           connect_args={"check_same_thread": False})
    create_tables(engine)
    session = sessionmaker(autocommit=False, autoflush=False,
                           bind=engine)()
    try:
        yield session
    finally:
        session.close()
        Base.metadata.drop_all(bind=engine)
