"""Exact combinatorial models of truncated-simplex characteristic pairs.

The package builds simple convex polytopes with exact rational
coordinates, characteristic functions over Z (sign classes) and GF(2),
the truncated-simplex family with its three boundary pieces and gluing
data, and homology / orientability certificates backed by a brute force
cellular chain complex oracle.
"""

__version__ = "0.1.0"
