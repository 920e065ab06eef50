"""Exception taxonomy shared by all swarmsvm modules.

Every error carries a ``category`` used by the CLI to pick an exit code
and emit a machine-parsable error line.
"""


class SwarmSvmError(Exception):
    """Base class for all package errors."""

    category = "error"


class ConfigError(SwarmSvmError, ValueError):
    """Invalid configuration: bad parameter values, malformed config files."""

    category = "config"


class DataError(SwarmSvmError, ValueError):
    """Invalid input data: bad datasets, missing files, domain violations."""

    category = "data"


class ParseError(DataError):
    """Malformed input file. ``line_no`` is 1-based when known."""

    def __init__(self, message, line_no=None):
        self.line_no = line_no
        if line_no is not None:
            message = f"line {line_no}: {message}"
        super().__init__(message)


class ConvergenceError(SwarmSvmError, RuntimeError):
    """A solver exhausted its budget before meeting its tolerance.

    ``residual`` holds the worst optimality violation at abort time.
    """

    category = "convergence"

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)
