"""Exact integer-feasibility tools for commensurability questions about tree RAAGs."""

__version__ = "0.1.0"
