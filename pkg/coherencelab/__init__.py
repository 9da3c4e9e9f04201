"""Spectral coherence calculations for correlated sources, atoms and pulses."""

__version__ = "1.0.0"
