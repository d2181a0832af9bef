"""Exact finite geometry: field towers, Desarguesian spreads, linear sets and
the equations of their images on the Grassmannian."""

__version__ = "0.1.0"
