"""Extremals of the vertical rolling disc, its Heisenberg approximation and their symmetries."""

__version__ = "0.1.0"
