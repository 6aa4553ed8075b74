"""Exception types."""


class GeometryError(ValueError):
    """A point or vector violates a membership or tangency constraint."""


class NotCurvatureAdaptedError(ValueError):
    """Shape operator and normal Jacobi operator fail to commute."""


class FocalPointError(ValueError):
    """A Jacobi scale factor vanished: the offset map is not an immersion."""


class CurveValidationError(ValueError):
    """A profile curve is not closed, regular, winding once, or small enough."""


class ConfigError(ValueError):
    """A scene configuration cannot be resolved."""
