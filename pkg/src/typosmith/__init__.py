"""Typo mining, statistics, generation, and statistical correction."""

__version__ = "0.1.0"
