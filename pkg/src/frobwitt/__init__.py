"""Frobenius semilinear algebra, Hasse-Witt matrices and mod-p zeta functions."""

__version__ = "0.1.0"
