"""Entanglement of symmetric qubit states from covariance matrices."""

__version__ = "0.1.0"
