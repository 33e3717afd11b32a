"""Equivariant discrete Morse theory via complexes of groups."""

__version__ = "0.1.0"
