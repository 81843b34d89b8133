"""Closed-form solution of the regularized control problem

    min_u  int_0^pi (x + u^2/2 + eps/2 udot^2) dt,   u(0) = u(pi) = 0,
    xdot = p,  pdot = u - x,  x(0) = p(0) = 0,

its eps -> 0+ limits, and a finite-difference check of the Euler-Lagrange
system.

All ``csch(a) * sinh(b)`` products are evaluated as ratios of decaying
exponentials so nothing overflows for eps down to 1e-12.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidInputError

HORIZON = math.pi


@dataclass(frozen=True)
class ControlProblem:
    """Regularization weight and the fixed horizon [0, pi].

    ``x0``/``p0`` default to the rest state; other values are only meant for
    integrator tests.
    """

    epsilon: float
    t0: float = 0.0
    horizon: float = HORIZON
    x0: float = 0.0
    p0: float = 0.0

    def __post_init__(self):
        if not (self.epsilon >= 0 and math.isfinite(self.epsilon)):
            raise InvalidInputError(f"epsilon must be finite and >= 0, got {self.epsilon}")
        if not self.t0 < self.horizon:
            raise InvalidInputError("t0 must be before the horizon")

    @property
    def T(self) -> float:
        return self.horizon


def _check_eps(eps):
    if not (eps > 0 and math.isfinite(eps)):
        raise DomainError(f"closed form needs eps > 0, got {eps}")


def _csch_sinh(a, b):
    """csch(a) * sinh(b) for a > 0 and 0 <= b, without forming either factor."""
    return (np.exp(b - a) - np.exp(-b - a)) / -np.expm1(-2.0 * a)


def _csch_cosh(a, b):
    return (np.exp(b - a) + np.exp(-b - a)) / -np.expm1(-2.0 * a)


def _coth(a):
    return (1.0 + np.exp(-2.0 * a)) / -np.expm1(-2.0 * a)


def optimal_control(t, eps: float):
    """u*(t) for eps > 0; vanishes at both ends."""
    _check_eps(eps)
    t = np.asarray(t, dtype=float)
    s = math.sqrt(eps)
    a = math.pi / s
    u = (
        (eps + 2.0) * _csch_sinh(a, (math.pi - t) / s)
        + eps * _csch_sinh(a, t / s)
        - np.cos(t)
        - eps
        - 1.0
    ) / (eps + 1.0)
    return u[()] if u.ndim == 0 else u


def optimal_state(t, eps: float, variant: str = "sqrt"):
    """x*(t) for eps > 0.

    ``variant="printed"`` uses csch(pi/eps) in place of csch(pi/sqrt(eps)) in
    the two prefactors; only the default is consistent with the dynamics.
    """
    _check_eps(eps)
    t = np.asarray(t, dtype=float)
    s = math.sqrt(eps)
    a = math.pi / s
    if variant == "sqrt":
        c_arg = a
    elif variant == "printed":
        c_arg = math.pi / eps
    else:
        raise InvalidInputError(f"unknown variant {variant!r}")
    k = (eps + 1.0) ** 2
    csch_only = 2.0 * math.exp(-c_arg) / -math.expm1(-2.0 * c_arg)
    x = (
        s / k * (eps**1.5 * _csch_sinh(c_arg, t / s) - eps * np.sin(t) * csch_only)
        - t * np.sin(t) / (2.0 * (eps + 1.0))
        + np.cos(t)
        - 1.0
        + s * (eps + 2.0) / k
        * (
            s * (_csch_sinh(c_arg, (math.pi - t) / s) - _csch_sinh(c_arg, a) * np.cos(t))
            + _csch_cosh(c_arg, a) * np.sin(t)
        )
    )
    return x[()] if x.ndim == 0 else x


def optimal_momentum(t, eps: float):
    """p*(t) = d x*/dt, differentiated by hand from the state formula."""
    _check_eps(eps)
    t = np.asarray(t, dtype=float)
    s = math.sqrt(eps)
    a = math.pi / s
    k = (eps + 1.0) ** 2
    csch = 2.0 * math.exp(-a) / -math.expm1(-2.0 * a)
    inner = s * (
        eps * (np.cos(t) * csch - _csch_cosh(a, t / s))
        - (eps + 2.0) * (s * np.sin(t) + np.cos(t) * _coth(a) - _csch_cosh(a, (math.pi - t) / s))
    )
    p = -(inner + k * np.sin(t) + (eps + 1.0) * (t * np.cos(t) + np.sin(t)) / 2.0) / k
    return p[()] if p.ndim == 0 else p


def optimal_objective(eps: float) -> float:
    _check_eps(eps)
    s = math.sqrt(eps)
    h = math.pi / (2.0 * s)
    # tanh(h) * (coth(h)^2 / (eps+1)^2 + 1) = coth(h)/(eps+1)^2 + tanh(h)
    coth = float(_coth(h))
    return s * (coth / (eps + 1.0) ** 2 + math.tanh(h)) - math.pi * (2.0 * eps + 3.0) / (
        4.0 * (eps + 1.0)
    )


def limit_functions(t):
    """(u_limit, x_limit) = (-1 - cos t, -t sin t / 2 + cos t - 1)."""
    t = np.asarray(t, dtype=float)
    u = -1.0 - np.cos(t)
    x = -0.5 * t * np.sin(t) + np.cos(t) - 1.0
    if t.ndim == 0:
        return u[()], x[()]
    return u, x


JLIMIT = -3.0 * math.pi / 4.0


@dataclass(frozen=True)
class CostatePair:
    lambda_at: Callable
    mu_at: Callable


def costates() -> CostatePair:
    return CostatePair(lambda t: -np.sin(t), lambda t: -np.cos(t) - 1.0)


# -- Euler-Lagrange residuals ------------------------------------------------

# 4th-order first/second derivative stencils
_D1_CENTRAL = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / 12.0
_D2_CENTRAL = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12.0
_D1_FWD = np.array(
    [
        [-25.0, 48.0, -36.0, 16.0, -3.0],
        [-3.0, -10.0, 18.0, -6.0, 1.0],
    ]
) / 12.0
_D2_FWD = np.array(
    [
        [45.0, -154.0, 214.0, -156.0, 61.0, -10.0],
        [10.0, -15.0, -4.0, 14.0, -6.0, 1.0],
    ]
) / 12.0


def fd_derivative4(f, h: float, order: int = 1):
    """4th-order finite-difference derivative with one-sided stencils at the ends."""
    f = np.asarray(f, dtype=float)
    n = f.size
    if n < 8:
        raise InvalidInputError("need at least 8 samples for 4th-order stencils")
    out = np.empty(n)
    if order == 1:
        c, e, scale = _D1_CENTRAL, _D1_FWD, h
    elif order == 2:
        c, e, scale = _D2_CENTRAL, _D2_FWD, h * h
    else:
        raise InvalidInputError("order must be 1 or 2")
    out[2:-2] = sum(c[k] * f[k : n - 4 + k] for k in range(5))
    w = e.shape[1]
    for i in range(2):
        out[i] = e[i] @ f[:w]
        # mirror: reversing the grid flips the sign of odd derivatives
        sign = -1.0 if order == 1 else 1.0
        out[n - 1 - i] = sign * (e[i] @ f[::-1][:w])
    return out / scale


RESIDUAL_NAMES = ("costate_x", "costate_p", "state_x", "state_p", "control")


@dataclass(frozen=True)
class ResidualReport:
    epsilon: float
    grid_size: int
    sup: dict
    interior_sup: dict

    def max(self) -> float:
        return max(self.sup.values())


def euler_lagrange_residual(eps: float, grid_size: int) -> ResidualReport:
    """Sup-norms of the five Euler-Lagrange residuals along the closed form.

    Time derivatives use 4th-order finite differences; ``interior_sup``
    leaves out the two points at each end where one-sided stencils apply.
    """
    _check_eps(eps)
    if grid_size < 16:
        raise InvalidInputError("grid_size must be >= 16")
    t = np.linspace(0.0, math.pi, grid_size)
    h = t[1] - t[0]
    cs = costates()
    lam, mu = cs.lambda_at(t), cs.mu_at(t)
    u = optimal_control(t, eps)
    x = optimal_state(t, eps)
    p = optimal_momentum(t, eps)
    res = {
        "costate_x": 1.0 - fd_derivative4(lam, h) + mu,
        # dL/dp = -lambda, so the stationarity condition is -lambda - mudot = 0
        "costate_p": -lam - fd_derivative4(mu, h),
        "state_x": fd_derivative4(x, h) - p,
        "state_p": fd_derivative4(p, h) + x - u,
        "control": u - mu - eps * fd_derivative4(u, h, order=2),
    }
    sup = {k: float(np.max(np.abs(v))) for k, v in res.items()}
    interior = {k: float(np.max(np.abs(v[2:-2]))) for k, v in res.items()}
    return ResidualReport(float(eps), grid_size, sup, interior)
