"""Truncated Fock-space kernels: linear algebra, gates, states."""
