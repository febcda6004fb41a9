"""Planar monotone 1-in-3 SAT to Euclidean k-matching: reduction, exact solvers and certifiers."""

__version__ = "0.1.0"
