"""Exception types shared across the package.

The CLI maps these onto exit codes: bad or missing input is exit 1,
a violated checked inequality is exit 2.
"""


class PlankforgeError(Exception):
    """Base class for all package errors."""


class InvalidInputError(PlankforgeError):
    """Malformed, empty, or out-of-contract input."""


class SpaceMismatchError(InvalidInputError):
    """Operands are tagged with different space models."""


class SupportRangeError(InvalidInputError):
    """A matrix row references a column beyond the sequence horizon."""

    def __init__(self, row: int, column: int, horizon: int):
        self.row = row
        self.column = column
        self.horizon = horizon
        super().__init__(
            f"row {row} references column {column} beyond horizon {horizon}"
        )


class PreconditionError(InvalidInputError):
    """An operation-specific precondition does not hold."""


class InsufficientDataError(InvalidInputError):
    """Too few rows or values for the requested diagnostic."""


class NoCertificateError(PlankforgeError):
    """An analytic divergence verdict was requested for an explicit list.

    Explicit families carry no closed form, so only partial sums are
    available; numeric divergence detection is unsound and is refused.
    """


class ConstructionImpossibleError(PlankforgeError):
    """The hypothesis required by a construction fails.

    Raised e.g. when a block partition with unbounded block sums is
    requested for a family whose inverse-power series converges.
    """


class ResourceLimitError(PlankforgeError):
    """A configured cap (horizon, enumeration size, retries) was exceeded."""


class BoundViolationError(PlankforgeError):
    """A checked inequality failed; this is a test-failure signal, not a bug
    in the caller's input."""
