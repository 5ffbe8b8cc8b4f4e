"""
Configuration settings for the bootstrap/multiple-imputation toolkit.
"""
import os
import logging
from datetime import datetime

VERSION = "0.1.0"

# File paths
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
SCENARIO_DIR = os.path.join(BASE_DIR, "scenarios")
DEFAULT_OUTPUT_DIR = os.path.join(BASE_DIR, "output")

# Logging configuration
LOG_DIR = os.path.join(BASE_DIR, "logs")
LOG_FILE = os.path.join(LOG_DIR, f"bootmi_{datetime.now().strftime('%Y%m%d_%H%M%S')}.log")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

# Numerical settings
RANK_TOLERANCE = 1e-10
DEFAULT_ALPHA = 0.05
MAX_FAILURE_RATE = 0.001

# Output formatting
CSV_FLOAT_FORMAT = "%.17g"

# Calibration of reference-based estimands
CALIBRATION_N = 100000
CALIBRATION_M = 50
CALIBRATION_TOLERANCE = 0.02

# Scenario ids and the JSON files shipped for them
SCENARIO_FILES = {
    "subgroup": "subgroup.json",
    "heteroscedastic": "heteroscedastic.json",
    "omitted-interaction": "omitted_interaction.json",
    "non-normal": "non_normal.json",
    "trial-mar": "trial_mar.json",
    "trial-j2r": "trial_j2r.json",
}

# Default method battery: (method, M, B)
DEFAULT_BATTERY = [
    ("mi-rubin", 10, 0),
    ("mi-boot-rubin", 10, 200),
    ("mi-boot-pooled-percentile", 10, 200),
    ("boot-mi-percentile", 10, 200),
    ("boot-mi-percentile", 1, 200),
    ("von-hippel", 2, 200),
]

# Column order of result files
POOLED_RESULT_COLUMNS = [
    "method", "M", "B", "point", "variance", "df",
    "ci_lower", "ci_upper", "alpha", "fallback_used",
]
SUMMARY_COLUMNS = [
    "label", "method", "M", "B", "nsim", "n_failed", "coverage",
    "median_ci_width", "mc_se_coverage", "mean_point", "true_theta",
]

_logging_configured = False


def configure_logging(level=logging.INFO, log_to_file=True):
    """
    Set up root logging once for command-line runs.

    Args:
        level (int): Logging level for the root logger
        log_to_file (bool): Also write records to LOG_FILE
    """
    global _logging_configured
    if _logging_configured:
        logging.getLogger().setLevel(level)
        return

    handlers = [logging.StreamHandler()]
    if log_to_file:
        os.makedirs(LOG_DIR, exist_ok=True)
        handlers.insert(0, logging.FileHandler(LOG_FILE))

    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers)
    _logging_configured = True
