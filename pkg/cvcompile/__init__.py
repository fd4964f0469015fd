"""Continuous-variable variational compiling and No-Free-Lunch toolkit."""

__version__ = "0.1.0"
