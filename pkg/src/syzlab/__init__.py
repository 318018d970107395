"""Exact computations with syzygies over Artinian local rings."""

__version__ = "0.1.0"
