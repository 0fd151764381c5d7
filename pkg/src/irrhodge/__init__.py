"""Exact verification toolkit for irregular Hodge filtrations and Kontsevich complexes."""

__version__ = "0.1.0"
