"""Integral area invariant signatures of planar shapes."""

__version__ = "0.1.0"
