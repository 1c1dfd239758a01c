"""Exception hierarchy.

Each family maps onto one CLI exit code (see :mod:`holobias.cli`).
"""


class HolobiasError(Exception):
    """Base class for all library errors."""

    exit_code = 1


class ConfigError(HolobiasError, ValueError):
    exit_code = 1


class ParseError(HolobiasError, ValueError):
    """Malformed catalog, geodesic table or test-function input."""

    exit_code = 2


class ConstraintError(ParseError):
    """Input parsed but violates a data-model constraint (mult < 1, conflicts)."""


class BasisError(ParseError):
    """An exact frequency references a basis name that was never declared."""


class PreconditionError(HolobiasError, ValueError):
    exit_code = 3


class BiasModeError(PreconditionError):
    """The holonomy test function has a nonzero mean coefficient."""


class RelationRefused(PreconditionError):
    """Relation analysis was asked for on floats without an independence declaration."""


class NumericGuardError(HolobiasError, ArithmeticError):
    """A numerical guard tripped: under-resolved grid, overflow, non-convergence."""

    exit_code = 4
