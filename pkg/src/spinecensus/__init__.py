"""Enumeration and invariants of one-face special spines built from open-chain o-graphs."""

__version__ = "0.1.0"
