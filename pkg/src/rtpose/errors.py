"""Exception types raised by the geometry routines."""


class GeometryError(ValueError):
    """Base class for geometric failures (CLI exit code 2)."""


class DomainError(GeometryError):
    """Input outside the domain of an operation (zero vector, negative quadrance)."""


class InconsistentTriangleError(GeometryError):
    pass


class DegenerateConfigurationError(GeometryError):
    """The tetrahedron collapsed: coincident bearings or camera on the ground."""


class HorizontalBearingError(DegenerateConfigurationError):
    pass


class ParallelLinesError(GeometryError):
    """Two image lines have no finite intersection."""


class AmbiguousSignError(GeometryError):
    pass


class BehindCameraError(GeometryError):
    pass
