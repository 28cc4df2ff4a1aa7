"""Delay-dependent H-infinity filtering for a quarter-car with a delayed road channel."""

__version__ = "0.1.0"
