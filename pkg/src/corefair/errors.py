"""Exception hierarchy shared across the package.

Each class carries the CLI exit code used by ``corefair`` when the error
escapes to the command line.
"""

EXIT_VALIDATION = 2
EXIT_SIZE_CAP = 3
EXIT_CONVERGENCE = 4
EXIT_INFEASIBLE = 5


class CoreFairError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1
    kind = "error"


class ValidationError(CoreFairError, ValueError):
    """Malformed input: bad shapes, negative utilities, unknown fields."""

    exit_code = EXIT_VALIDATION
    kind = "validation"


class UnsupportedConstraintError(ValidationError):
    """Operation applied to a constraint family it does not support."""


class SizeCapError(CoreFairError, RuntimeError):
    """Exhaustive search refused because the instance exceeds a size cap."""

    exit_code = EXIT_SIZE_CAP
    kind = "size_cap"

    def __init__(self, message, cap_name=None, cap_value=None):
        super().__init__(message)
        self.cap_name = cap_name
        self.cap_value = cap_value


class ConvergenceError(CoreFairError, RuntimeError):
    """Iterative solver hit its round cap without meeting its certificate."""

    exit_code = EXIT_CONVERGENCE
    kind = "convergence"

    def __init__(self, message, last_score=None):
        super().__init__(message)
        self.last_score = last_score


class UnboundedError(CoreFairError, RuntimeError):
    """Linear program is unbounded (distinct from infeasible)."""

    exit_code = EXIT_CONVERGENCE
    kind = "unbounded"


class InfeasibleError(CoreFairError, RuntimeError):
    """No feasible point: an LP without solutions or exhausted retries."""

    exit_code = EXIT_INFEASIBLE
    kind = "infeasible"

    def __init__(self, message, failure_fraction=None, attempts=None):
        super().__init__(message)
        self.failure_fraction = failure_fraction
        self.attempts = attempts
