"""Exact arithmetic kernel: polynomials, rational functions, quotient fields, linear algebra."""
from .fields import CC, QQ, ComplexField, Field, PivotDegenerate, QuotElt, QuotientField, RationalField, RatFuncField
from .intmatrix import IntegerSolution, SmithForm, int_det, smith_normal_form, solve_integer
from .linalg import FieldMatrix, RrefResult, cofactor_det, det_fraction_free, nullspace, rank, rref, solve
from .polynomial import (
    DimensionError,
    MultiPoly,
    PrincipalIdeal,
    normal_form,
    parse_poly,
    poly_gcd,
    poly_lcm,
)
from .ratfunc import RatFunc

__all__ = [
    "CC", "QQ", "ComplexField", "Field", "PivotDegenerate", "QuotElt", "QuotientField",
    "RationalField", "RatFuncField", "IntegerSolution", "SmithForm", "int_det",
    "smith_normal_form", "solve_integer", "FieldMatrix", "RrefResult", "cofactor_det",
    "det_fraction_free", "nullspace", "rank", "rref", "solve", "DimensionError", "MultiPoly",
    "PrincipalIdeal", "normal_form", "parse_poly", "poly_gcd", "poly_lcm", "RatFunc",
]
