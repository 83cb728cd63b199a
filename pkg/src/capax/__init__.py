"""Gutt-Hutchings and ECH capacities of toric domains."""

__version__ = "0.1.0"
