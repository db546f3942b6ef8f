"""Finite-n laboratory for stability results in sparse random sets."""

__version__ = "0.1.0"
