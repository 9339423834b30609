"""Relativistic quantum densities and their classical limits."""

__version__ = "0.1.0"
