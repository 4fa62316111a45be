import logging
import os

from sqlalchemy import create_engine, text
from sqlalchemy.orm import declarative_base, sessionmaker

from app.utils.config import RESULTS_DATABASE_URL

logger = logging.getLogger(__name__)

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.dirname(
    os.path.abspath(__file__))))

# SQLAlchemy setup
engine = create_engine(RESULTS_DATABASE_URL)
SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=engine)
Base = declarative_base()


def make_session_factory(database_url: str):
    """Session factory bound to another results database"""
    return sessionmaker(autocommit=False, autoflush=False,
                        bind=create_engine(database_url))


def get_db():
    """Get database session"""
    db = SessionLocal()
    try:
        yield db
    finally:
        db.close()


def create_tables(bind=None):
    """Create all tables"""
    # Register the schemas on Base.metadata
    from app.schemas import run_record_schema  # noqa: F401
    Base.metadata.create_all(bind=bind or engine)


def run_migrations(database_url: str = RESULTS_DATABASE_URL) -> bool:
    """Upgrade the results database to head, creating tables if Alembic fails"""
    from alembic import command
    from alembic.config import Config

    try:
        alembic_cfg = Config(os.path.join(PROJECT_ROOT, "alembic.ini"))
        alembic_cfg.set_main_option(
            "script_location", os.path.join(PROJECT_ROOT, "alembic"))
        alembic_cfg.attributes["database_url"] = database_url
        command.upgrade(alembic_cfg, "head")
        logger.info("✅ Results database migrated")
        return True
    except Exception as e:
        logger.warning(f"Migrations failed ({e}), creating tables directly")
        create_tables(create_engine(database_url))
        return False


def test_connection(bind=None) -> bool:
    """Test database connection"""
    try:
        with (bind or engine).connect() as conn:
            conn.execute(text("SELECT 1"))
        logger.info("✅ Results database connection successful")
        return True
    except Exception as e:
        logger.error(f"❌ Results database connection failed: {e}")
        return False
