"""Exact-arithmetic kernel for difference algebra."""

__version__ = "0.1.0"
