"""Symmetry checks and simulations for kinetic and hydrodynamic plasma models."""

__version__ = "0.1.0"
