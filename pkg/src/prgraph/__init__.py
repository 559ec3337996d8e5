"""Pseudo-random graph certification, induced motif census and graph generators."""

__version__ = "0.1.0"
