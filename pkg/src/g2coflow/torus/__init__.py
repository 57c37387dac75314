"""Spectral verification layer on the fibered flat-torus model."""
