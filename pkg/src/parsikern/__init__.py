"""Kernelization, exact distances and lower-bound certificates for the
t-state maximum parsimony distance between unrooted phylogenetic trees."""

__version__ = "0.1.0"
