"""Equivalent-circuit and link-level simulation of tunable filtering metasurfaces."""

__version__ = "0.1.0"
