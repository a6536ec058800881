"""Numerical laboratory for the Belavkin-Staszewski relative entropy."""

__version__ = "0.1.0"
