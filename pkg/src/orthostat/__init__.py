"""Orthostat - finite-width statistics of orthogonally initialized tanh networks."""

__version__ = "0.1.0"
