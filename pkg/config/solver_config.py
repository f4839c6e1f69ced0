import os
from dotenv import load_dotenv

load_dotenv(".env.local")
load_dotenv(".env")

# Root finding
ROOT_RTOL = float(os.getenv("DUALSPACE_ROOT_RTOL", "1e-13"))
NORM_RTOL = float(os.getenv("DUALSPACE_NORM_RTOL", "1e-12"))
OVERFLOW_BOUND = float(os.getenv("DUALSPACE_OVERFLOW_BOUND", "1e300"))
MAX_BISECTIONS = int(os.getenv("DUALSPACE_MAX_BISECTIONS", "2200"))

# Young function grids
GRID_POINTS = int(os.getenv("DUALSPACE_GRID_POINTS", "2048"))
GRID_UMIN = float(os.getenv("DUALSPACE_GRID_UMIN", "1e-6"))
GRID_UMAX = float(os.getenv("DUALSPACE_GRID_UMAX", "1e6"))
RHO_POINTS = int(os.getenv("DUALSPACE_RHO_POINTS", "4096"))
RHO_LEVELS = int(os.getenv("DUALSPACE_RHO_LEVELS", "17"))

# Optimizers
RESTARTS = int(os.getenv("DUALSPACE_RESTARTS", "8"))
ASCENT_MAX_ITER = int(os.getenv("DUALSPACE_ASCENT_MAX_ITER", "2000"))
GRAM_THRESHOLD = float(os.getenv("DUALSPACE_GRAM_THRESHOLD", "1e-10"))


def validate_solver_config():
    """Validate that solver tolerances and grid sizes make sense"""
    if not 0 < ROOT_RTOL < 1e-6:
        raise ValueError("DUALSPACE_ROOT_RTOL must lie in (0, 1e-6)")
    if not 0 < NORM_RTOL < 1e-6:
        raise ValueError("DUALSPACE_NORM_RTOL must lie in (0, 1e-6)")
    if GRID_POINTS < 2 or RHO_POINTS < 2:
        raise ValueError("grid sizes must be at least 2")
    if not 0 < GRID_UMIN < GRID_UMAX:
        raise ValueError("DUALSPACE_GRID_UMIN must be positive and below DUALSPACE_GRID_UMAX")
    if RHO_LEVELS < 1 or RESTARTS < 1:
        raise ValueError("DUALSPACE_RHO_LEVELS and DUALSPACE_RESTARTS must be positive")
    return True
