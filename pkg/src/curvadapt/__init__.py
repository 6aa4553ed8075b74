"""Curvature-adapted hypersurfaces built from seeds in products of space forms."""
from .construct import (
    ConstructedHypersurface,
    admissible_radius,
    as_hypersurface,
    flat_section,
    focal_radius,
    focal_table,
    make_curve,
    product_angle,
    strongly_jacobi_field,
    tube_map,
    unit_normal,
    validate_curve,
)
from .errors import (
    ConfigError,
    CurveValidationError,
    FocalPointError,
    GeometryError,
    NotCurvatureAdaptedError,
)
from .hypersurface import Equator, Equidistant, GeodesicSphere, Horosphere, seed
from .kernels import BACKEND
from .matfun import joint_eigenspaces, spectral_cos, spectral_sinc, sym_eigen
from .oracle import compare_spectra, fd_gauss_curvature, fd_shape_operator, ode_jacobi, verify_point
from .spaceform import ProductSpace, SpaceForm

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigError",
    "ConstructedHypersurface",
    "CurveValidationError",
    "Equator",
    "Equidistant",
    "FocalPointError",
    "GeodesicSphere",
    "GeometryError",
    "Horosphere",
    "NotCurvatureAdaptedError",
    "ProductSpace",
    "SpaceForm",
    "admissible_radius",
    "as_hypersurface",
    "compare_spectra",
    "fd_gauss_curvature",
    "fd_shape_operator",
    "flat_section",
    "focal_radius",
    "focal_table",
    "joint_eigenspaces",
    "make_curve",
    "ode_jacobi",
    "product_angle",
    "seed",
    "spectral_cos",
    "spectral_sinc",
    "strongly_jacobi_field",
    "sym_eigen",
    "tube_map",
    "unit_normal",
    "validate_curve",
    "verify_point",
]
