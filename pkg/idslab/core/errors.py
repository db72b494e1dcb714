"""Exception hierarchy shared by every idslab module."""


class IdsLabError(Exception):
    """Base class for all errors raised by idslab."""

    exit_code: int = 1


class ConfigError(IdsLabError):
    """Invalid coefficient spec, config file or command-line override."""

    exit_code = 2


class DomainError(IdsLabError):
    """An input lies outside the domain of an operation (nonpositive field, aperiodic field)."""


class AssemblyError(IdsLabError):
    """Field and boundary condition cannot be assembled together."""


class DimensionMismatch(IdsLabError):
    pass


class RangeError(IdsLabError):
    """An energy falls outside the range covered by a computed curve."""


class FactorizationBreakdown(IdsLabError):
    """A pivot vanished while factoring A - E*I; E sits on an eigenvalue."""


class ConvergenceError(IdsLabError):
    pass


class ComputationError(IdsLabError):
    """A Monte Carlo driver lost every sample."""


class InvariantViolation(IdsLabError):
    """A structural invariant (bounds, symmetry, monotonicity) failed on computed data."""
