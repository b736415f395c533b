"""Command-line interface for inverse flight dynamics."""

from .main import cli, main

__all__ = ["cli", "main"]
