"""
Settings for the branching toolkit.

Every tunable is read from the environment once, here. Command-line flags take precedence
over these values.
"""

import logging
import os


# Seed for the sampled parts of the verification battery
SEED = int(os.environ.get("BRANCHING_SEED", default=14))

# Worker processes for per-lambda sweeps; 1 runs inline
JOBS = int(os.environ.get("BRANCHING_JOBS", default=1))

LOG_LEVEL = os.environ.get("BRANCHING_LOG_LEVEL", default="WARNING")

# Largest tensor space the oracle is allowed to build
TENSOR_LIMIT = int(os.environ.get("BRANCHING_TENSOR_LIMIT", default=20000))

# Random n = 4 instances per battery run
VERIFY_SAMPLES = int(os.environ.get("BRANCHING_VERIFY_SAMPLES", default=500))

# Random instances for the matching vs Hall comparison
HALL_SAMPLES = int(os.environ.get("BRANCHING_HALL_SAMPLES", default=10000))

# Sizes of the symbolic checks; the integrality sweep runs up to INTEGRALITY_N
SYMBOLIC_N = int(os.environ.get("BRANCHING_SYMBOLIC_N", default=4))
SYMBOLIC_D = int(os.environ.get("BRANCHING_SYMBOLIC_D", default=3))
INTEGRALITY_N = int(os.environ.get("BRANCHING_INTEGRALITY_N", default=5))

JSON_SCHEMA = "branching/1"

LOG_FORMAT = "%(asctime)s [%(levelname)s] %(name)s: %(message)s"


def configure_logging(level=None):
    """Sends log records to stderr so that stdout only carries results."""
    logging.basicConfig(format=LOG_FORMAT, level=(level or LOG_LEVEL).upper())
