"""Exact-arithmetic toolkit for finite-group lattices and flows on G-graphs."""

__version__ = "0.1.0"
