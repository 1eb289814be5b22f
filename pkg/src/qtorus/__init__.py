"""Exact and numerical workbench for quantum torus algebras and their mirrors."""

__version__ = "0.1.0"
