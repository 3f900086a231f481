"""Application configuration and environment variables."""

import logging
import os
from typing import Any, Dict

from dotenv import load_dotenv

from . import __version__

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)


class Config:
    """Application configuration class."""

    # Application Configuration
    APP_TITLE = "loschart"
    APP_VERSION = __version__

    # Logging / output
    LOG_LEVEL = os.environ.get("LOSCHART_LOG_LEVEL", "WARNING")
    OUTPUT_DIR = os.environ.get("LOSCHART_OUTPUT_DIR", "outputs")
    PLOT_FORMAT = os.environ.get("LOSCHART_PLOT_FORMAT", "svg")

    # Experiment defaults
    DEFAULT_SEED = os.environ.get("LOSCHART_SEED", "0")
    RANK_FRACTION = os.environ.get("LOSCHART_RANK_FRACTION", "0.05")
    MAX_SUBCARRIERS = os.environ.get("LOSCHART_MAX_SUBCARRIERS", "4096")

    # Physical and numerical constants
    SPEED_OF_LIGHT = 299_792_458.0
    BISECTION_TOL = 1e-10
    DIRICHLET_SINGULARITY_TOL = 1e-9

    # Config / dataset file schema versions
    CONFIG_FILE_VERSION = "1"
    DATASET_FORMAT_VERSION = "1"

    @classmethod
    def seed(cls) -> int:
        return int(cls.DEFAULT_SEED)

    @classmethod
    def rank_fraction(cls) -> float:
        return float(cls.RANK_FRACTION)

    @classmethod
    def max_subcarriers(cls) -> int:
        return int(cls.MAX_SUBCARRIERS)

    @classmethod
    def get_defaults(cls) -> Dict[str, Any]:
        """Get the run-time defaults as a dictionary."""
        return {
            "LOG_LEVEL": cls.LOG_LEVEL,
            "OUTPUT_DIR": cls.OUTPUT_DIR,
            "PLOT_FORMAT": cls.PLOT_FORMAT,
            "SEED": cls.seed(),
            "RANK_FRACTION": cls.rank_fraction(),
            "MAX_SUBCARRIERS": cls.max_subcarriers(),
        }

    @classmethod
    def validate_config(cls) -> None:
        """Validate environment overrides; bad values fall back to defaults."""
        checks = [
            ("LOSCHART_SEED", "DEFAULT_SEED", "0", int),
            ("LOSCHART_RANK_FRACTION", "RANK_FRACTION", "0.05", float),
            ("LOSCHART_MAX_SUBCARRIERS", "MAX_SUBCARRIERS", "4096", int),
        ]
        invalid = []
        for env_name, attr, default, cast in checks:
            try:
                cast(getattr(cls, attr))
            except (TypeError, ValueError):
                invalid.append(env_name)
                setattr(cls, attr, default)

        if not 0.0 < cls.rank_fraction() < 0.5:
            invalid.append("LOSCHART_RANK_FRACTION")
            cls.RANK_FRACTION = "0.05"

        if cls.PLOT_FORMAT not in ("svg", "pdf"):
            invalid.append("LOSCHART_PLOT_FORMAT")
            cls.PLOT_FORMAT = "svg"

        if invalid:
            logger.warning("[Config] Invalid environment variables: %s", ", ".join(invalid))
            logger.warning("[Config] Falling back to defaults for those values.")

    @classmethod
    def configure_logging(cls, level: str = None) -> None:
        """Install the root handler used by the command line."""
        logging.basicConfig(
            level=(level or cls.LOG_LEVEL).upper(),
            format="[%(levelname)s] %(message)s",
        )


# Create global config instance
config = Config()
config.validate_config()
