"""Adjoint-twisted cochains of the dual spine, the 1-loop invariant and the exact reduced verification."""
from .pipeline import (Certificate, GluingComplexTorsion, VerificationReport, gluing_complex, gluing_complex_torsion,
                       one_loop, tor2_pipeline, verify_commutative_square, verify_reduced)
from .spine import (SpinePresentation, build_delta0, build_delta1, check_boundary_invariant, delta0_rows, delta1_rows,
                    develop_spine, edge_axes, weil_columns)
from .words import (C, H, Letter, MobiusWord, R, ad_matrix, ad_of_word, chart_word, coords_to_matrix, det3,
                    letter_matrix, parse_word, traceless_coords, weil_cocycle, word_matrix)

__all__ = [
    "Certificate", "GluingComplexTorsion", "VerificationReport", "gluing_complex", "gluing_complex_torsion",
    "one_loop", "tor2_pipeline", "verify_commutative_square", "verify_reduced",
    "SpinePresentation", "build_delta0", "build_delta1", "check_boundary_invariant", "delta0_rows", "delta1_rows",
    "develop_spine", "edge_axes", "weil_columns",
    "C", "H", "Letter", "MobiusWord", "R", "ad_matrix", "ad_of_word", "chart_word", "coords_to_matrix", "det3",
    "letter_matrix", "parse_word", "traceless_coords", "weil_cocycle", "word_matrix",
]
