"""Dirichlet characters and L-functions over F_q[T], with exact moment formulas."""

__version__ = "0.1.0"
