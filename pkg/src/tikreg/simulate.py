"""Forward simulation of the forced oscillator and trapezoidal evaluation of the
regularized objective.

The pipeline mirrors the reference workflow: the control is a not-a-knot
cubic spline through uniform samples, the state is integrated with
fixed-step RK4, the state samples are splined back onto the quadrature grid,
``udot`` is a finite difference on that grid, and the integrand
``x + u^2/2 + eps/2 udot^2`` is summed with the trapezoidal rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from . import kernels
from .analytic import ControlProblem
from .errors import InvalidInputError, NumericFailure

DEFAULT_STEPS = 2000
DEFAULT_QUAD_POINTS = 1000


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


def cubic_spline(grid, values) -> CubicSpline:
    """Not-a-knot cubic interpolant; at least 4 strictly increasing knots."""
    grid = np.asarray(grid, dtype=float)
    values = np.asarray(values, dtype=float)
    if grid.ndim != 1 or grid.shape != values.shape[:1]:
        raise InvalidInputError("grid and values must be 1-D with equal length")
    if grid.size < 4:
        raise InvalidInputError(f"not-a-knot spline needs >= 4 points, got {grid.size}")
    if np.any(np.diff(grid) <= 0):
        raise InvalidInputError("spline knots must be strictly increasing (no duplicates)")
    return CubicSpline(grid, values, bc_type="not-a-knot")


def derivative_fd(values, dt: float) -> np.ndarray:
    """Central differences inside, first-order one-sided at both ends."""
    values = np.asarray(values, dtype=float)
    if values.size < 3:
        raise InvalidInputError("derivative_fd needs at least 3 samples")
    return np.gradient(values, dt)


@dataclass(frozen=True)
class ControlSignal:
    """Control samples on a uniform grid, evaluated through a not-a-knot spline."""

    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.grid, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if g.ndim != 1 or g.shape != v.shape:
            raise InvalidInputError("grid and values must be 1-D with equal length")
        if g.size < 4:
            raise InvalidInputError("a control signal needs at least 4 samples")
        steps = np.diff(g)
        if np.any(steps <= 0):
            raise InvalidInputError("control grid must be strictly increasing")
        h = (g[-1] - g[0]) / (g.size - 1)
        if np.max(np.abs(steps - h)) > 1e-12 * max(abs(h), 1.0) * g.size:
            raise InvalidInputError("control grid must be uniform")
        object.__setattr__(self, "grid", _frozen(g))
        object.__setattr__(self, "values", _frozen(v))

    @classmethod
    def sample(cls, func, t0: float, T: float, n: int) -> "ControlSignal":
        t = np.linspace(t0, T, n)
        return cls(t, np.asarray(func(t), dtype=float) * np.ones_like(t))

    @property
    def t0(self) -> float:
        return float(self.grid[0])

    @property
    def T(self) -> float:
        return float(self.grid[-1])

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(cubic_spline(self.grid, self.values)(t))
        # knots return their stored sample exactly
        idx = np.clip(np.searchsorted(self.grid, t), 0, self.grid.size - 1)
        hit = self.grid[idx] == t
        out = np.where(hit, self.values[idx], out)
        return out[()] if out.ndim == 0 else out


@dataclass(frozen=True)
class Trajectory:
    grid: np.ndarray
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        for name in ("grid", "x", "p"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        if not (self.grid.shape == self.x.shape == self.p.shape):
            raise InvalidInputError("trajectory arrays must have equal length")

    def position(self, t):
        """State position splined from the integrator samples."""
        return cubic_spline(self.grid, self.x)(t)


def _check_control(u: ControlSignal, problem: ControlProblem):
    if not (math.isclose(u.t0, problem.t0, abs_tol=1e-12) and math.isclose(u.T, problem.T, rel_tol=1e-12)):
        raise InvalidInputError(
            f"control grid [{u.t0}, {u.T}] does not span the horizon [{problem.t0}, {problem.T}]"
        )
    bad = np.flatnonzero(~np.isfinite(u.values))
    if bad.size:
        err = NumericFailure(f"control is not finite at t = {u.grid[bad[0]]:.6g}")
        err.time = float(u.grid[bad[0]])
        raise err


def integrate_states(
    u: ControlSignal, problem: ControlProblem, steps: int = DEFAULT_STEPS
) -> Trajectory:
    """Classical RK4 for xdot = p, pdot = u - x on ``steps`` equal steps."""
    if steps < 16:
        raise InvalidInputError("steps must be >= 16")
    _check_control(u, problem)
    xs, ps = kernels.integrate(
        np.ascontiguousarray(u.values[None, :]), problem.t0, problem.T, int(steps),
        problem.x0, problem.p0,
    )
    grid = np.linspace(problem.t0, problem.T, steps + 1)
    return Trajectory(grid, xs[0], ps[0])


def objective_batch(
    controls,
    problem: ControlProblem,
    quad_points: int = DEFAULT_QUAD_POINTS,
    steps: int = DEFAULT_STEPS,
) -> np.ndarray:
    """Objective for each row of ``controls`` (samples on a uniform grid over the horizon)."""
    if quad_points < 64:
        raise InvalidInputError("quad_points must be >= 64")
    if steps < 16:
        raise InvalidInputError("steps must be >= 16")
    controls = np.ascontiguousarray(np.atleast_2d(controls), dtype=float)
    if controls.shape[1] < 4:
        raise InvalidInputError("controls need at least 4 samples")
    return kernels.objective(
        controls, problem.t0, problem.T, float(problem.epsilon), int(steps), int(quad_points),
        problem.x0, problem.p0,
    )


def evaluate_objective(
    u: ControlSignal,
    problem: ControlProblem,
    quad_points: int = DEFAULT_QUAD_POINTS,
    steps: int = DEFAULT_STEPS,
) -> float:
    """Trapezoidal value of int (x + u^2/2 + eps/2 udot^2) dt on ``quad_points`` nodes."""
    _check_control(u, problem)
    return float(objective_batch(u.values, problem, quad_points, steps)[0])
