"""Exact field towers, factorization and explicit Galois groups."""
from .factor import Irreducibility, factor_over, irreducible_over, roots_in
from .tower import ExactField, FieldElement, extend, finite_field, minimal_polynomial

__all__ = [
    "ExactField",
    "FieldElement",
    "Irreducibility",
    "extend",
    "factor_over",
    "finite_field",
    "irreducible_over",
    "minimal_polynomial",
    "roots_in",
]
