"""Exact lattice and pseudolattice tools for Tyurin degenerations, elliptic fibrations and their mirrors."""

__version__ = "0.1.0"

__all__ = ["__version__"]
