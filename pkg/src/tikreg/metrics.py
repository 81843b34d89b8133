"""Diagnostics for numerically optimized controls."""

from __future__ import annotations

import numpy as np

from .analytic import optimal_control
from .errors import InvalidInputError
from .simulate import DEFAULT_QUAD_POINTS, ControlSignal, derivative_fd


def _window(u: ControlSignal, a: float, b: float, points: int) -> np.ndarray:
    if not a < b:
        raise InvalidInputError("window needs a < b")
    t = np.linspace(u.t0, u.T, points)
    return t[(t > a) & (t <= b)]


def layer_error(u: ControlSignal, eps: float, a: float = 0.0, b: float = 0.1,
                points: int = DEFAULT_QUAD_POINTS) -> float:
    """sup |u - u*| over grid points in (a, b]; the grid spans the horizon."""
    t = _window(u, a, b, points)
    return float(np.max(np.abs(u(t) - optimal_control(t, eps))))


def slope_sign_changes(u: ControlSignal, a: float = 0.0, b: float = 0.5,
                       points: int = DEFAULT_QUAD_POINTS) -> int:
    """Sign changes of the finite-difference slope at grid points in (a, b).

    Zero slopes are skipped rather than counted as a sign of their own.
    """
    t = np.linspace(u.t0, u.T, points)
    slope = derivative_fd(u(t), t[1] - t[0])
    s = np.sign(slope[(t > a) & (t < b)])
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))
