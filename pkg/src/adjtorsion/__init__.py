"""Gluing equations, flattenings, 1-loop invariants and adjoint torsion of ideal triangulations."""

__version__ = "0.1.0"
