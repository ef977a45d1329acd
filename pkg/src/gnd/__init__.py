"""Generative neural decoding of stabilizer codes."""

__version__ = "0.1.0"
