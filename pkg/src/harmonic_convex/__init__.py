"""Harmonic interpolation of convex bodies and random-determinant checks."""

__version__ = "0.1.0"
