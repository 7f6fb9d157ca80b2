"""Numerical periods, iterated integrals and extension classes on hyperelliptic curves."""
__version__ = "0.1.0"
