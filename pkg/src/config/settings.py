"""
Configuration settings for the toric weighted K-stability toolkit
"""

import os
from pathlib import Path

from dotenv import load_dotenv

load_dotenv()

# Project root directory
PROJECT_ROOT = Path(__file__).parent.parent.parent

# Data directories
DATA_DIR = PROJECT_ROOT / "Data"
EXAMPLES_DIR = DATA_DIR / "examples"
RESULTS_DIR = DATA_DIR / "results"

# Application settings
APP_NAME = "toric-wkstab"
APP_VERSION = "1.0.0"

# Geometry limits
MAX_DIMENSION = 6
MAX_REFINEMENT = 4
DEFAULT_REFINEMENT = 1

# Quadrature settings
DEFAULT_QUADRATURE_DEGREE = 7
MIN_QUADRATURE_DEGREE = 2

# Built-in smooth weights: name -> number of parameters per dimension n
# exp_linear: exp(c0 + c1*y1 + ... + cn*yn), parameters (c0, ..., cn)
# gaussian:   exp(-s * |y - m|^2),           parameters (s, m1, ..., mn)
SMOOTH_WEIGHT_TABLE = ("exp_linear", "gaussian")

# Lattice sums
LATTICE_POINT_LIMIT = 10 ** 7
LATTICE_CHUNK_SIZE = 4096

# Numerical tolerances for float paths
SOLVER_TOLERANCE = 1e-10
FLOAT_TOLERANCE = 1e-9
LP_FLOAT_TOLERANCE = 1e-12
CONDITION_LIMIT = 1e12

# Log-concavity of smooth weights: central-difference step and eigenvalue tolerance
LOG_CONCAVITY_STEP = 1e-4
LOG_CONCAVITY_TOLERANCE = 1e-6

# Continuity of the extremal family: |l_eps - l_0| <= LIPSCHITZ_SLACK * C * eps
LIPSCHITZ_SLACK = 2.0

# Serialization
FLOAT_SIGNIFICANT_DIGITS = 12
HASH_PREFIX_LENGTH = 12

# Performance settings
MAX_WORKERS = int(os.getenv("TORIC_WKSTAB_WORKERS", "4"))
DEFAULT_SEED = 42

# Exit codes
EXIT_OK = 0
EXIT_INPUT_ERROR = 2
EXIT_INTERNAL_ERROR = 3
EXIT_DESTABILIZED = 10

# Logging settings
LOG_LEVEL = os.getenv("TORIC_WKSTAB_LOG_LEVEL", "INFO")
LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"
LOG_FILE = PROJECT_ROOT / "logs" / "toric_wkstab.log"

# Report text
DSIGMA_NOTE = (
    "Boundary measure d(sigma): on a facet with primitive integral normal u, "
    "Euclidean (n-1)-measure divided by |u|, i.e. the lattice of the facet "
    "hyperplane has covolume 1."
)
ONE_SIDED_CAVEAT = (
    "The LP minimizes over PL convex functions subordinate to one triangulation. "
    "delta < 0 certifies a destabilizer; delta > 0 is evidence of stability "
    "relative to this triangulation, not a proof."
)


def create_directories(*extra):
    """Create output directories if they don't exist"""
    directories = [DATA_DIR, RESULTS_DIR, LOG_FILE.parent, *extra]

    for directory in directories:
        Path(directory).mkdir(parents=True, exist_ok=True)
