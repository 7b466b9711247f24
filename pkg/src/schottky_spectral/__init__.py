"""Spectral computations for Schottky surfaces and their congruence covers."""

__version__ = "0.1.0"
