"""Quantum vs semiclassical annealing of two bosons on a cavity-coupled four-site ring."""

__version__ = "0.1.0"
