import os
from dotenv import load_dotenv

load_dotenv(".env.local")
load_dotenv(".env")

# Verification harness
DEFAULT_SEED = int(os.getenv("DUALSPACE_SEED", "42"))
DEFAULT_TRIALS = int(os.getenv("DUALSPACE_TRIALS", "100"))
DEFAULT_DIM = int(os.getenv("DUALSPACE_DIM", "8"))
DEFAULT_EXPONENT = float(os.getenv("DUALSPACE_EXPONENT", "3.0"))

# Reports
REPORT_FORMAT = os.getenv("DUALSPACE_REPORT_FORMAT", "json")
REPORT_TIMING = os.getenv("DUALSPACE_REPORT_TIMING", "0") == "1"
LOG_LEVEL = os.getenv("DUALSPACE_LOG_LEVEL", "INFO")


def validate_harness_config():
    """Validate that harness defaults are usable"""
    if DEFAULT_TRIALS < 1:
        raise ValueError("DUALSPACE_TRIALS must be positive")
    if DEFAULT_DIM < 1:
        raise ValueError("DUALSPACE_DIM must be positive")
    if not DEFAULT_EXPONENT > 1:
        raise ValueError("DUALSPACE_EXPONENT must be greater than 1")
    if REPORT_FORMAT not in ("json", "csv"):
        raise ValueError("DUALSPACE_REPORT_FORMAT must be json or csv")
    return True
