"""Spike solutions of a singularly perturbed Schrödinger-Maxwell system on 3D lattice domains."""

__version__ = "0.1.0"
