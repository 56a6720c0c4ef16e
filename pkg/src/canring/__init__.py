"""Section rings of Q-divisors on projective spaces and Hirzebruch surfaces."""
from __future__ import annotations

from .bounds import applicable_bounds, effective_bounds, hirz_bounds, proj_bounds
from .convergents import lower_convergents, two_convergent_decompose
from .divisor_file import parse_divisor_spec, serialize_divisor
from .exact import Polynomial, parse_polynomial
from .geometry import QDivisor, Variety, divisor, ghost_complete, graded_dimension
from .oracle import Caps, compute, verify_bounds
from .presentation import effective_presentation, one_hyperplane_presentation, veronese_presentation

__all__ = [
    "Caps",
    "Polynomial",
    "QDivisor",
    "Variety",
    "applicable_bounds",
    "compute",
    "divisor",
    "effective_bounds",
    "effective_presentation",
    "ghost_complete",
    "graded_dimension",
    "hirz_bounds",
    "lower_convergents",
    "one_hyperplane_presentation",
    "parse_divisor_spec",
    "parse_polynomial",
    "proj_bounds",
    "serialize_divisor",
    "two_convergent_decompose",
    "verify_bounds",
    "veronese_presentation",
]
