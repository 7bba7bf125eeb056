import logging
import os

from dotenv import load_dotenv

load_dotenv()

DATABASE_URL = os.getenv("DATABASE_URL", "sqlite:///./flsat.db")
LOG_LEVEL = os.getenv("FLSAT_LOG_LEVEL", "INFO")

# Search and enumeration bounds
ORACLE_MAX_SIZE = int(os.getenv("FLSAT_ORACLE_MAX_SIZE", "6"))
ORACLE_MAX_ATOMS = int(os.getenv("FLSAT_ORACLE_MAX_ATOMS", "400"))
COVER_BOUND = int(os.getenv("FLSAT_COVER_BOUND", "4"))
ROYAL_CAP = int(os.getenv("FLSAT_ROYAL_CAP", "2"))
MAX_OMEGA = int(os.getenv("FLSAT_MAX_OMEGA", "4"))
CLIQUE_WIDTH = int(os.getenv("FLSAT_CLIQUE_WIDTH", "2"))
TYPE_LIMIT = int(os.getenv("FLSAT_TYPE_LIMIT", "4096"))
BUDGET_SECONDS = float(os.getenv("FLSAT_BUDGET_SECONDS", "60"))


def setup_logging(level: str = None):
    """Configure root logging for the CLI and the API server"""
    logging.basicConfig(
        format='%(levelname)s: %(message)s',
        level=getattr(logging, (level or LOG_LEVEL).upper(), logging.INFO),
    )
