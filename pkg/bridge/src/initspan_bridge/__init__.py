"""Contextual separator-head encoder bridging transformers to the CRF decoder."""

__version__ = "0.1.0"
