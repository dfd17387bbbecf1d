"""Exact curvature, conformal-flatness and Picard-Fuchs computations for holomorphic metrics."""

__version__ = "0.1.0"
