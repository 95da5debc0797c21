"""Numerical equivariant Chern characters for superconnections with invariant one-forms."""

__version__ = "0.1.0"
