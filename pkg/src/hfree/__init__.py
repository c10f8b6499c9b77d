"""Simulator and verification toolkit for constraint-free random graph
processes with exact open/closed pair bookkeeping."""

__version__ = "0.1.0"
