"""Synthetic Bragg CDI data and 3D phase retrieval."""

__version__ = "0.1.0"
