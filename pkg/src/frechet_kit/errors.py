"""Exception types shared across the package."""


class FrechetKitError(Exception):
    """Base class for all package errors."""


class DegenerateSegment(FrechetKitError):
    """Raised when a zero-length segment is used where a direction is needed."""


class EmptyInput(FrechetKitError):
    """Raised when an operation receives an empty collection it cannot handle."""


class InvalidCurve(FrechetKitError):
    """Raised for curves with no vertices, NaNs, or inconsistent dimensions."""


class DimensionMismatch(FrechetKitError):
    """Raised when two geometric objects disagree on ambient dimension."""


class BudgetExceeded(FrechetKitError):
    """Raised when an enumeration hits its configured work cap.

    This is a reported outcome, never silent: callers either propagate it or
    convert it into an explicit third result state next to success/null.
    """

    def __init__(self, message: str = "enumeration budget exhausted", spent: int = 0):
        super().__init__(message)
        self.spent = spent


class TooLarge(FrechetKitError):
    """Raised when a brute-force oracle would exceed its hard size cap."""


class EmptyStep(FrechetKitError):
    """Raised when the backward extraction finds an empty step.

    By construction this cannot happen after a successful forward pass, so
    seeing it means there is a bug in the caller or in the geometry layer.
    """

    def __init__(self, index: int):
        super().__init__(f"backward extraction hit an empty step at index {index}")
        self.index = index


class ParseError(FrechetKitError):
    """Raised for malformed curve files or CLI payloads."""
