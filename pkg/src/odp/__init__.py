"""Bifurcation of overdetermined elliptic problems on spherical caps."""

__version__ = "0.1.0"
