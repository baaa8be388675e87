"""Canonical k-generators, disjointness-graph densities and exact search."""

__version__ = "0.1.0"
