"""Exact algebra and Monte Carlo tools for algebraic Gaussian models."""

__version__ = "0.1.0"
