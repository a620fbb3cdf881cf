"""Finite-scale toolkit for symmetry actions on block algebras and their
spectral presentations: validate tensor-functor data into correspondences,
rebuild the acted-on algebra, extract spectral data from concrete actions,
certify the round trip in both directions, and deform by 2-cocycles."""

__version__ = "0.1.0"
