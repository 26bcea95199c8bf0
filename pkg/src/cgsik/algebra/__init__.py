"""Exact polynomial algebra over the rationals: sparse polynomials, Groebner
bases, comprehensive Groebner systems, real roots and triangular solving."""

from .cgs import CgsSegment, cgs, find_segment, generic_segment, sample_segment_point
from .groebner import (
    DEFAULT_CAPS,
    GroebnerBasis,
    ResourceCaps,
    ResourceLimitExceeded,
    buchberger,
    is_groebner,
    normal_form,
    reduce,
    s_polynomial,
    same_ideal,
)
from .poly import MonomialOrder, Poly, RingMismatchError, block, format_poly, grevlex, lex, parse_poly
from .ratfunc import DegeneratePointError, ParametricPoly, RationalFunction, specialize
from .roots import RealRoot, isolate_real_roots, rational_roots, sturm_count, sturm_sequence
from .triangular import PositiveDimensionalError, RealSolutions, is_zero_dimensional, solve_triangular

__all__ = [
    "DEFAULT_CAPS",
    "CgsSegment",
    "DegeneratePointError",
    "GroebnerBasis",
    "MonomialOrder",
    "ParametricPoly",
    "Poly",
    "PositiveDimensionalError",
    "RationalFunction",
    "RealRoot",
    "RealSolutions",
    "ResourceCaps",
    "ResourceLimitExceeded",
    "RingMismatchError",
    "block",
    "buchberger",
    "cgs",
    "find_segment",
    "format_poly",
    "generic_segment",
    "grevlex",
    "is_groebner",
    "is_zero_dimensional",
    "isolate_real_roots",
    "lex",
    "normal_form",
    "parse_poly",
    "rational_roots",
    "reduce",
    "s_polynomial",
    "same_ideal",
    "sample_segment_point",
    "solve_triangular",
    "specialize",
    "sturm_count",
    "sturm_sequence",
]
