"""Domain errors raised by the library and mapped to CLI exit codes."""

from entanglement_atlas.decorators.catch_exceptions import EntanglementAtlasError, UsageError

__all__ = [
    "EntanglementAtlasError",
    "UsageError",
    "StateSyntaxError",
    "IndexOutOfRange",
    "ArityMismatch",
    "BadSubset",
    "InvalidShape",
    "InvalidArgument",
    "InvalidConfiguration",
    "InvalidParameter",
    "ShapeMismatch",
    "ShapeNotPermutable",
    "NonQubitShape",
    "ZeroState",
    "ColumnMismatch",
    "EmptyFamily",
    "UnsupportedArity",
    "Unsupported",
    "SearchSpaceTooLarge",
    "UnknownPermutationAction",
    "DivisibilityViolation",
    "TableError",
    "VerificationFailed",
]


class StateSyntaxError(UsageError):
    """State text does not follow the term grammar."""


class IndexOutOfRange(UsageError):
    """A basis index lies outside 1..d_i."""


class ArityMismatch(UsageError):
    """Number of subsystems differs from what the operation expects."""


class BadSubset(UsageError):
    """A subset of subsystems is empty, full or outside the index set."""


class InvalidShape(UsageError):
    """Dimension vector is malformed."""


class InvalidArgument(UsageError):
    """An argument value violates the operation precondition."""


class InvalidConfiguration(UsageError):
    """Settings file cannot be read or does not match the settings schema."""


class InvalidParameter(UsageError):
    """A family parameter takes one of its excluded values."""


class ShapeMismatch(UsageError):
    """Operands have incompatible shapes."""


class ShapeNotPermutable(UsageError):
    """The dimension vector is not stable under the requested permutation."""


class NonQubitShape(UsageError):
    """Operator expressions act on qubit shapes only."""


class ZeroState(UsageError):
    """The operation is undefined on the zero state."""


class ColumnMismatch(UsageError):
    """Stacked matrices must share the column count."""


class EmptyFamily(UsageError):
    """An intersection over an empty family was requested."""


class UnsupportedArity(UsageError):
    """No hardcoded generating set exists for this number of subsystems."""


class Unsupported(UsageError):
    """No built-in table or feasible search covers the request."""


class SearchSpaceTooLarge(UsageError):
    """The candidate count exceeds the configured search guard."""


class UnknownPermutationAction(InvalidArgument):
    """The generating set is not closed under the subsystem permutation."""


class DivisibilityViolation(EntanglementAtlasError):
    """A family nullity is not divisible by the dimension of the uncovered factor."""


class TableError(EntanglementAtlasError):
    """A packaged table is missing or malformed."""


class VerificationFailed(EntanglementAtlasError):
    """At least one verification check did not pass."""
