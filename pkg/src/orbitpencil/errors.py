"""Exception types shared across the package."""


class OrbitPencilError(Exception):
    """Base class for all package errors."""


class UnsupportedAlgebra(OrbitPencilError):
    """Requested Lie algebra series/rank is not supported."""


class InvalidParabolic(OrbitPencilError):
    """Parabolic root subset is not contained in the positive roots."""


class ShapeError(OrbitPencilError):
    """Array dimensions are inconsistent with the operation."""


class DomainError(OrbitPencilError):
    """A chart point (or its finite-difference stencil) left the domain."""


class DegeneratePoint(OrbitPencilError):
    """Bivector is degenerate at the queried point; inversion undefined."""


class OutOfRange(OrbitPencilError):
    """Parameter lies outside the admissible interval."""


class ConfigError(OrbitPencilError):
    """Run configuration is missing, malformed, or inconsistent."""
