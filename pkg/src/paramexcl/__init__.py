"""Certified parameter exclusion for one-dimensional families of maps."""

__version__ = "0.1.0"
