"""Exact Pfaffians of invariant forms on perfect complexes over group rings."""

__version__ = "0.1.0"
