"""Weighted lattice walks in the non-negative orthant: exact enumeration,
kernel-method diagonals, contributing singularities, and coefficient
asymptotics, with an independent dynamic-programming oracle for every result.
"""

from orthantwalks.laurent import LaurentPoly, Jet, jet_of_exponential_substitution
from orthantwalks.stepset import StepSet, Decomposition, SymmetryClass, build_stepset

__all__ = [
    "LaurentPoly",
    "Jet",
    "jet_of_exponential_substitution",
    "StepSet",
    "Decomposition",
    "SymmetryClass",
    "build_stepset",
]
