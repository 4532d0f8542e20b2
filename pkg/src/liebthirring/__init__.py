"""Lieb-Thirring constants on spheres, SU(2) and SO(3)."""

__version__ = "0.1.0"
