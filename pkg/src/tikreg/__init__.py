"""Tikhonov regularization lab.

Two studies share this package: conditioning of nearly singular symmetric
matrices under ``A + eps D^T D`` with a first-order spectral prediction, and an
exactly solvable regularized optimal control problem solved in closed form,
by a CRAB sine basis with Differential Evolution, and by direct transcription.
"""

__version__ = "0.1.0"

from .kernels import BACKEND  # noqa: E402

__all__ = ["__version__", "BACKEND"]
