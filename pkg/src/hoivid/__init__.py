"""Weakly conditioned human-object-interaction video generation toolkit."""

__version__ = "0.1.0"
