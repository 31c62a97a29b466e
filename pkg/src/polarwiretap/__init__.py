"""Polar-coded wiretap schemes: construction, encoding, decoding and leakage analysis."""

__version__ = "0.1.0"
