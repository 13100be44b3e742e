"""Noise-assisted electron transfer in a donor-acceptor-sink model."""

__version__ = "0.1.0"
