"""Direct pointwise transcription: optimize control values at uniform time
nodes, endpoints pinned to zero, with the control between nodes given by the
not-a-knot spline.

The endpoint constraints are eliminated (only interior nodes are free) and
the interior values are improved by steepest descent with forward-difference
gradients and a backtracking (Armijo) line search. No RNG is involved.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .analytic import ControlProblem
from .de import OptimResult
from .errors import InvalidInputError
from .simulate import DEFAULT_QUAD_POINTS, DEFAULT_STEPS, ControlSignal, objective_batch

ARMIJO_C = 1e-4


@dataclass(frozen=True)
class DirectConfig:
    nodes: int = 15
    eval_budget: int = 36000
    step_init: float = 1.0
    tol: float = 1e-5
    fd_step: float = 1e-6

    def __post_init__(self):
        if self.nodes < 4:
            raise InvalidInputError("direct transcription needs >= 4 nodes")
        if self.eval_budget < self.nodes:
            raise InvalidInputError("evaluation budget too small for a single gradient")
        if not (self.step_init > 0 and self.tol >= 0 and self.fd_step > 0):
            raise InvalidInputError("step_init and fd_step must be > 0, tol >= 0")


def initial_guess(t, T: float = math.pi):
    """u00(t) = t (t - T); zero at both ends."""
    t = np.asarray(t, dtype=float)
    return t * (t - T)


def direct_solve(
    problem: ControlProblem,
    config: DirectConfig | None = None,
    quad_points: int = DEFAULT_QUAD_POINTS,
    steps: int = DEFAULT_STEPS,
) -> tuple[OptimResult, ControlSignal]:
    config = config or DirectConfig()
    nodes = np.linspace(problem.t0, problem.T, config.nodes)
    z = initial_guess(nodes[1:-1] - problem.t0, problem.T - problem.t0)
    n_free = z.size

    def full(zs):
        zs = np.atleast_2d(zs)
        out = np.zeros((zs.shape[0], config.nodes))
        out[:, 1:-1] = zs
        return out

    evals = 0

    def f(zs):
        nonlocal evals
        vals = objective_batch(full(zs), problem, quad_points, steps)
        evals += vals.size
        return vals

    fz = float(f(z)[0])
    history_v, history_c, walls = [fz], [z.copy()], [0.0]
    start = time.perf_counter()
    alpha = config.step_init
    status = "budget"
    while evals + n_free <= config.eval_budget:
        h = config.fd_step * np.maximum(1.0, np.abs(z))
        probes = z[None, :] + np.diag(h)
        g = (f(probes) - fz) / h
        if np.max(np.abs(g)) <= config.tol:
            status = "converged"
            break
        gg = float(g @ g)
        accepted = False
        while evals < config.eval_budget:
            trial = z - alpha * g
            ft = float(f(trial)[0])
            if ft <= fz - ARMIJO_C * alpha * gg:
                accepted = True
                break
            alpha *= 0.5
            if alpha < 1e-14:
                break
        if not accepted:
            status = "stalled" if alpha < 1e-14 else "budget"
            break
        z, fz = trial, ft
        alpha *= 2.0
        history_v.append(fz)
        history_c.append(z.copy())
        walls.append(time.perf_counter() - start)

    result = OptimResult(
        best_coeffs=full(z)[0],
        best_value=fz,
        history_values=np.array(history_v),
        history_coeffs=np.array([full(c)[0] for c in history_c]),
        evaluations=evals,
        wall_seconds=np.array(walls),
        status=status,
        method="direct",
    )
    return result, ControlSignal(nodes, full(z)[0])
