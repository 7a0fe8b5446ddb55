"""Exact interval exchange transformations and the groups they generate."""

from .domain import CIRCLE, INTERVAL, Domain, Point, Subdomain
from .exact import (ExactReal, Symbol, SymbolBasis, UndecidedComparison, as_real, cmp,
                    in_q_span, mod_interval, quadratic_symbol, refinement_budget)
from .iet import (Iet, IetError, apply, commutator, compose, cut_domain, d, disc_set, identity,
                  inverse, is_invariant, norm_estimate, restrict, rotation,
                  synchronized_rotation)

__all__ = [
    "CIRCLE", "INTERVAL", "Domain", "Point", "Subdomain",
    "ExactReal", "Symbol", "SymbolBasis", "UndecidedComparison", "as_real", "cmp",
    "in_q_span", "mod_interval", "quadratic_symbol", "refinement_budget",
    "Iet", "IetError", "apply", "commutator", "compose", "cut_domain", "d", "disc_set",
    "identity", "inverse", "is_invariant", "norm_estimate", "restrict", "rotation",
    "synchronized_rotation",
]

__version__ = "0.1.0"
