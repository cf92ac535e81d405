"""Pseudo-fermionic coherent states of a damped two-level system, with exact Grassmann algebra."""

__version__ = "0.1.0"
