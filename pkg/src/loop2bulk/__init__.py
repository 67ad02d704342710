"""Compile array-based loop programs to bulk comprehension code and run them."""

__version__ = "0.1.0"
