import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Campaign execution
BENCH_WORKERS = int(os.getenv("BENCH_WORKERS", "1"))
BENCH_OUTPUT_DIR = os.getenv("BENCH_OUTPUT_DIR", "results")
BENCH_DATASET_PATH = os.getenv("BENCH_DATASET_PATH")

# Results store
RESULTS_DATABASE_URL = os.getenv(
    "RESULTS_DATABASE_URL",
    "sqlite:///./results.db"
)

LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO")

# Numerical policy for the maintained inverse / log-determinant
DESIGN_REFRESH_INTERVAL = int(
    os.getenv("DESIGN_REFRESH_INTERVAL", str(2 ** 20)))

DEFAULT_PULL_BUDGET = int(os.getenv("DEFAULT_PULL_BUDGET", str(10 ** 8)))


def get_worker_count() -> int:
    """Worker count for batch execution, re-read so tests can patch the env"""
    return max(1, int(os.getenv("BENCH_WORKERS", str(BENCH_WORKERS))))
