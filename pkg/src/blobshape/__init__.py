"""Optimal planar region shapes minimizing average pairwise L_p distance."""

__version__ = "0.1.0"

from .errors import (
    BlobError,
    ConvergenceError,
    CsvFormatError,
    CurveValidationError,
    DomainError,
    QuadratureError,
)
from .metrics import INFINITY, PNorm, Point2, lp_distance
from .geometry import FullBoundary, OctantCurve, assemble_full, invert_octant
from .curves import circle_octant, diamond_octant, square_octant
from .quadrature import QuadratureSpec
from .functionals import (
    FunctionalReport,
    area_octant,
    d_value,
    m_full,
    m_octant,
    monte_carlo_m,
)
from .variational import (
    ResidualProfile,
    da_dh,
    dm_dh,
    full_residual,
    full_residual_profile,
    octant_residual,
    octant_residual_profile,
    reduced_residual_p1,
    reduced_residual_p1_profile,
)
from .special_solvers import OdeSolution, solve_p1, solve_p2, solve_pinf
from .optimizer import CurveParameterization, OptimizationTrace, minimize_d
from .curve_io import read_curve_csv, write_full_csv, write_octant_csv

__all__ = [
    "BlobError",
    "ConvergenceError",
    "CsvFormatError",
    "CurveValidationError",
    "DomainError",
    "QuadratureError",
    "INFINITY",
    "PNorm",
    "Point2",
    "lp_distance",
    "FullBoundary",
    "OctantCurve",
    "assemble_full",
    "invert_octant",
    "circle_octant",
    "diamond_octant",
    "square_octant",
    "QuadratureSpec",
    "FunctionalReport",
    "area_octant",
    "d_value",
    "m_full",
    "m_octant",
    "monte_carlo_m",
    "ResidualProfile",
    "da_dh",
    "dm_dh",
    "full_residual",
    "full_residual_profile",
    "octant_residual",
    "octant_residual_profile",
    "reduced_residual_p1",
    "reduced_residual_p1_profile",
    "OdeSolution",
    "solve_p1",
    "solve_p2",
    "solve_pinf",
    "CurveParameterization",
    "OptimizationTrace",
    "minimize_d",
    "read_curve_csv",
    "write_full_csv",
    "write_octant_csv",
    "__version__",
]
