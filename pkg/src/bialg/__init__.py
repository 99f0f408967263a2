"""Bialgebraic curves of the real Weierstrass map.

Exact classification of the lines whose image under
``(x, y) -> (Re wp(x+iy), Im wp(x+iy))`` is algebraic, plus numerical
verification by high precision evaluation and vanishing-polynomial fits.
"""
from .classify import (
    Branch,
    Classification,
    ComplexLine,
    RealLine,
    SingletonReason,
    bialgebraic_lines,
    classify,
    complex_bialgebraic_line,
    line_from_rho,
    line_with_direction,
    pushforward_line,
    rho_from_lattice_direction,
)
from .exactnum import QuadElem, Rat, integer_kernel, recognize_rational
from .fitting import FitResult, Tolerances, Verdict, fit_vanishing_poly, snap_integer_relation
from .lattice import (
    IsogenySet,
    Lattice,
    TauSpec,
    UndecidableFromFloats,
    geodesic_through,
    is_cm,
    isog_conj_set,
    lattice_membership,
    normalize_tau,
    rational_abs_witness,
)
from .verify import density_probe, halfline_check, sample_line, verify_complex_line, verify_line
from .weierstrass import POLE, PrecisionCfg, invariants, p_map, wp, wp_prime

__version__ = "0.1.0"

__all__ = [
    "Branch", "Classification", "ComplexLine", "FitResult", "IsogenySet", "Lattice", "POLE", "PrecisionCfg",
    "QuadElem", "Rat", "RealLine", "SingletonReason", "TauSpec", "Tolerances", "UndecidableFromFloats", "Verdict",
    "bialgebraic_lines", "classify", "complex_bialgebraic_line", "density_probe", "fit_vanishing_poly",
    "geodesic_through", "halfline_check", "integer_kernel", "invariants", "is_cm", "isog_conj_set",
    "lattice_membership", "line_from_rho", "line_with_direction", "normalize_tau", "p_map", "pushforward_line",
    "rational_abs_witness", "recognize_rational", "rho_from_lattice_direction", "sample_line",
    "snap_integer_relation", "verify_complex_line", "verify_line", "wp", "wp_prime",
]
