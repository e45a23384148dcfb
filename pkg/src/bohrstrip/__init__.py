"""Random +-1 polynomials, Dirichlet series built from them, and related numerics."""

__version__ = "0.1.0"
