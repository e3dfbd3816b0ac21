"""
Exception hierarchy shared by the library and the command-line front end.

Each class carries the process exit code the CLI reports for it:
2 for input errors, 3 for empty or degenerate models, 4 for I/O failures.
"""


class RobParetoError(Exception):
    exit_code = 2


class DomainError(RobParetoError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnknownIdError(RobParetoError, LookupError):
    """Candidate or scenario id not present in the instance."""


class ConfigError(RobParetoError, ValueError):
    pass


class InstanceFormatError(RobParetoError, ValueError):
    pass


class LpDimensionError(RobParetoError, ValueError):
    pass


class SolverStalledError(RobParetoError, RuntimeError):
    """Simplex iteration cap reached even under Bland's rule."""


class UnboundedUncertaintyError(RobParetoError):
    """Worst case over a polyhedral scenario set is unbounded."""


class EmptyModelError(RobParetoError):
    exit_code = 3


class EmptyFeasibleSetError(EmptyModelError):
    pass


class InvariantViolation(RobParetoError, AssertionError):
    exit_code = 3


class OutputError(RobParetoError, OSError):
    exit_code = 4
