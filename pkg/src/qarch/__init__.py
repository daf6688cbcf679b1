"""Reinforcement-learning search for variational quantum classifier circuits."""

from .kernels import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
