# ============================================================================
# ERRORS
# ============================================================================


class TriangleLabError(Exception):
    """Base class for every error raised by the lab"""


class DomainError(TriangleLabError, ValueError):
    """Argument outside the domain of an operation (negative radius, non-finite value, ...)"""


class DimensionError(DomainError):
    """Ambient dimension outside the range an operation supports"""

    def __init__(self, operation: str, d: int, minimum: int):
        super().__init__(f"{operation} requires d >= {minimum}, got d={d}")
        self.operation = operation
        self.d = d
        self.minimum = minimum


class InvalidIndexError(DomainError):
    """Dyadic index (i, j, k) outside the decomposition's index set"""


class TestFunctionSyntaxError(DomainError):
    """Textual test-function description could not be parsed"""

    __test__ = False


class UnboundedFunctionError(DomainError):
    """Operation needs a bounded test function"""


class FitError(TriangleLabError):
    """Envelope fit did not have enough surviving points"""
