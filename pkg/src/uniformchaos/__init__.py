"""Uniform structures, group actions on shift spaces, and desk-scale chaos certificates."""

__version__ = "0.1.0"
