"""Exact-rational complementary pivoting LP engine with a simplex referee."""

from .model import CanonicalLp, Constraint, GeneralLp, canonicalize, emit_instance, parse_instance

__all__ = ["CanonicalLp", "Constraint", "GeneralLp", "canonicalize", "emit_instance", "parse_instance"]
