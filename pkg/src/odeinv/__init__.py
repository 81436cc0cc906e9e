"""Differential invariants of third-order ODEs under fiber-preserving maps."""
__version__ = "0.1.0"
