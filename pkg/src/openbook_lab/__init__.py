"""Exact combinatorial computations with planar open book decompositions."""

__version__ = "0.1.0"
