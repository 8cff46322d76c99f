"""Khovanov-type homology of virtual and twisted link diagrams with dotted gradings."""

__version__ = "0.1.0"
