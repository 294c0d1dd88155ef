"""Desk-scale geometry of graph products of cyclic groups."""

__version__ = "0.1.0"
