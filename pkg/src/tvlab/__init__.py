"""Truncated Hilbert-module numerics for Bergman spaces on the ball and on zero varieties."""

__version__ = "0.1.0"

from tvlab.kernels import BACKEND  # noqa: E402

__all__ = ["BACKEND", "__version__"]
