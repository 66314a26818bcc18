"""Discrete octonionic analysis on hZ^8 in the split (Weyl) formulation."""

from .lattice import GridFunction, LatticeWindow, Region
from .octonion import Octonion, associator, basis_product, oct_conj, oct_mul, oct_norm
from .operators import WeylVariant, apply_cr, apply_laplacian, apply_weyl, apply_weyl_right
from .stokes import (
    BoundaryInterpretation,
    StokesReport,
    associator_probe,
    boundary_rhs,
    half_space_report,
    stokes_density,
    stokes_sum,
    telescope_residue,
)
from .weyl import ModuleElement, SplitGenerator

__version__ = "0.1.0"

__all__ = [
    "BoundaryInterpretation",
    "GridFunction",
    "LatticeWindow",
    "ModuleElement",
    "Octonion",
    "Region",
    "SplitGenerator",
    "StokesReport",
    "WeylVariant",
    "apply_cr",
    "apply_laplacian",
    "apply_weyl",
    "apply_weyl_right",
    "associator",
    "associator_probe",
    "basis_product",
    "boundary_rhs",
    "half_space_report",
    "oct_conj",
    "oct_mul",
    "oct_norm",
    "stokes_density",
    "stokes_sum",
    "telescope_residue",
]
