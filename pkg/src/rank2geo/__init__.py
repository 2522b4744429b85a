"""Totally geodesic submanifolds of compact rank-2 symmetric spaces."""
__version__ = "0.1.0"
