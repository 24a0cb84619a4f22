"""Longest and Exact Detour solvers."""

__version__ = "0.1.0"
