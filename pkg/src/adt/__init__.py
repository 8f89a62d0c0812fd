"""Algebraic specifications of computable functions over abstract data types."""

__version__ = "0.1.0"
