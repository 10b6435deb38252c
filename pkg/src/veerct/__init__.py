"""Veering triangulations and Cannon-Thurston tessellations from flat surfaces."""

__version__ = "0.1.0"
