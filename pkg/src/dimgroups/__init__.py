"""Exact computation with simple dimension groups."""

__version__ = "0.1.0"
