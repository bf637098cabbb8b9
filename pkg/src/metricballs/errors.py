"""Exception hierarchy shared by every module of the package."""


class GeometryError(ValueError):
    """Base class for all domain errors raised by metricballs."""


class DimensionMismatch(GeometryError):
    pass


class UnsupportedDimension(GeometryError):
    pass


class DegenerateCrossRatio(GeometryError):
    pass


class CoincidentPoints(GeometryError):
    pass


class RadiusOutOfRange(GeometryError):
    pass


class DegenerateRadius(GeometryError):
    pass


class PointOnBoundary(GeometryError):
    pass


class PointOutsideDomain(GeometryError):
    pass


class BoundaryTooSmall(GeometryError):
    pass


class SamplerExhausted(GeometryError):
    pass


class EmptyRegionSampled(GeometryError):
    pass


class CenterOutsideRegion(GeometryError):
    pass


class InadmissibleParameters(GeometryError):
    pass


class BracketNotStraddling(GeometryError):
    pass


class NoRootInRange(GeometryError):
    pass


class NoBoundaryOnSegment(GeometryError):
    pass


class DuplicatePuncture(GeometryError):
    pass


class ParseError(GeometryError):
    """Malformed domain spec; ``position`` is the offending character index."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at position {position})")
        self.position = position
