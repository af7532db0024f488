"""Exception types shared across the package."""


class GeometryError(Exception):
    """Base class for all tgeom errors."""


class DimensionMismatchError(GeometryError):
    """Points or vectors with incompatible chart dimensions."""


class OrderMismatchError(GeometryError):
    """Multivectors of different orders where equal orders are required."""


class InvalidWorldSpecError(GeometryError):
    """Malformed or incomplete world specification."""


class SingularMetricError(GeometryError):
    """A metric or fundamental-metric matrix is not invertible."""


class ComplexLengthError(GeometryError):
    """A squared length / radicand is negative where a real length is needed.

    Raised instead of silently producing NaN on the spacelike/complex branch.
    """


class DegenerateSkeletonError(GeometryError):
    """Tube skeleton has vanishing squared length."""


class SolverError(GeometryError):
    """An iterative solver failed to converge."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail or {}
