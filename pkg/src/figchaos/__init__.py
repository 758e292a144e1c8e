"""Chaos diagnostics for FIGARCH volatility processes."""

__version__ = "0.1.0"
