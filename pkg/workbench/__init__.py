"""Desk-scale constructions for almost-free abelian groups, ultrametric
automorphism groups, equation chains in complete metric algebras and
finite stability ranks."""

__version__ = "0.3.0"
