"""Chopped random basis: controls are sine series on [t0, t0 + T],

    u(t) = sum_j c_j sin(j pi (t - t0) / T),

so every candidate vanishes at both ends. Coefficients are optimized with
Differential Evolution; the 1/j^2 amplitude decay enters only through the
initial population.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analytic import ControlProblem
from .de import DEConfig, OptimResult, de_optimize
from .errors import InvalidInputError
from .simulate import DEFAULT_QUAD_POINTS, DEFAULT_STEPS, ControlSignal, objective_batch


@dataclass(frozen=True)
class CrabBasis:
    modes: int = 12
    t0: float = 0.0
    T: float = math.pi

    def __post_init__(self):
        if self.modes < 1:
            raise InvalidInputError("CRAB basis needs at least one mode")
        if not self.T > 0:
            raise InvalidInputError("basis length T must be positive")

    def matrix(self, t) -> np.ndarray:
        """Basis functions sampled at ``t``: shape (modes, len(t))."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        tau = (t - self.t0) / self.T
        if np.any(tau < -1e-12) or np.any(tau > 1 + 1e-12):
            raise InvalidInputError("time outside the basis horizon")
        j = np.arange(1, self.modes + 1, dtype=float)[:, None]
        B = np.sin(j * math.pi * tau[None, :])
        # sin(j*pi) is not exactly 0 in floating point
        B[:, (tau <= 0) | (tau >= 1)] = 0.0
        return B


def reconstruct(coeffs, t, basis: CrabBasis | None = None):
    """Evaluate the sine series with raw coefficients at ``t``."""
    coeffs = np.asarray(coeffs, dtype=float)
    basis = basis or CrabBasis(modes=coeffs.size)
    if coeffs.shape != (basis.modes,):
        raise InvalidInputError(f"expected {basis.modes} coefficients, got {coeffs.shape}")
    scalar = np.ndim(t) == 0
    out = coeffs @ basis.matrix(t)
    return float(out[0]) if scalar else out


def crab_solve(
    problem: ControlProblem,
    basis: CrabBasis | None = None,
    config: DEConfig | None = None,
    quad_points: int = DEFAULT_QUAD_POINTS,
    steps: int = DEFAULT_STEPS,
    callback=None,
) -> tuple[OptimResult, ControlSignal]:
    """Optimize the sine coefficients; returns the DE trace and the best control
    sampled on the ``quad_points`` grid."""
    basis = basis or CrabBasis(t0=problem.t0, T=problem.T - problem.t0)
    config = config or DEConfig(ND=basis.modes)
    if basis.modes != config.ND:
        raise InvalidInputError(f"basis has {basis.modes} modes but DE searches {config.ND} dimensions")
    grid = np.linspace(problem.t0, problem.T, quad_points)
    B = basis.matrix(grid)

    def objective(coeffs):
        return objective_batch(np.atleast_2d(coeffs) @ B, problem, quad_points, steps)

    result = de_optimize(objective, config, vectorized=True, callback=callback)
    result.method = "crab"
    return result, ControlSignal(grid, result.best_coeffs @ B)
