"""
Run-wide defaults for tolerances, lattice sweeps and parallelism.
"""
import os
from dataclasses import dataclass

from .errors import ConfigError


# Dominance tolerances: "<= within noise" versus "strictly better"
EQ_TOL = 1e-9
STRICT_TOL = 1e-9

# Simplex kernel tolerances
LP_FEAS_TOL = 1e-9
LP_OPT_TOL = 1e-9

# Simplex lattice used for sweeps over the decision simplex
DEFAULT_STEP = 0.05
DEFAULT_REFINEMENTS = 2

# Tolerance for membership of a point in the unit simplex
SIMPLEX_TOL = 1e-12

THREADS_ENV = "ROBPARETO_THREADS"


@dataclass(frozen=True)
class Tolerances:
    eq_tol: float = EQ_TOL
    strict_tol: float = STRICT_TOL

    def __post_init__(self):
        if not (self.eq_tol >= 0.0 and self.strict_tol >= 0.0):
            raise ConfigError("tolerances must be nonnegative")


DEFAULT_TOLERANCES = Tolerances()


# Resolve the worker cap: explicit override, then environment, then serial
def thread_count(override=None):
    raw = override if override is not None else os.environ.get(THREADS_ENV)
    if raw is None or raw == "":
        return 1
    try:
        threads = int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    if threads < 1:
        raise ConfigError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return threads
