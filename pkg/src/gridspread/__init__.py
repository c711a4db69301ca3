"""Simulation of disinformation-driven demand shifts and their impact on
radial distribution grids."""

__version__ = "0.1.0"
