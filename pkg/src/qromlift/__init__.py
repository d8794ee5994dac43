"""Exact simulation of quantum oracle algorithms against tiny random oracles."""

__version__ = "0.1.0"
