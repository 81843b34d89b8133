"""Pure numpy/scipy versions of the compiled kernels.

Same signatures and semantics as ``_ckernels``. Batched work is vectorized
across rows, so the RK4 loop runs once per step for the whole batch.
"""

import numpy as np
from scipy.integrate import trapezoid
from scipy.interpolate import CubicSpline


def _uniform(t0, T, n):
    return np.linspace(t0, T, n)


def spline_eval(y, t0, T, ts):
    y = np.asarray(y, dtype=float)
    return CubicSpline(_uniform(t0, T, y.shape[0]), y, bc_type="not-a-knot")(ts)


def integrate(controls, t0, T, steps, x0=0.0, p0=0.0):
    controls = np.atleast_2d(np.asarray(controls, dtype=float))
    nb, n = controls.shape
    hr = (T - t0) / steps
    nodes = t0 + np.arange(steps) * hr
    # u at t_k, t_k + h/2 and t_{k+1}; the last node is evaluated at T exactly
    tk = np.append(nodes, T)
    spl = CubicSpline(_uniform(t0, T, n), controls, axis=1, bc_type="not-a-knot")
    u_nodes = spl(tk)
    u_half = spl(nodes + 0.5 * hr)
    xs = np.empty((nb, steps + 1))
    ps = np.empty((nb, steps + 1))
    x = np.full(nb, float(x0))
    p = np.full(nb, float(p0))
    xs[:, 0] = x
    ps[:, 0] = p
    half = 0.5 * hr
    for k in range(steps):
        u0 = u_nodes[:, k]
        uh = u_half[:, k]
        u1 = u_nodes[:, k + 1]
        k1x = p
        k1p = u0 - x
        k2x = p + half * k1p
        k2p = uh - (x + half * k1x)
        k3x = p + half * k2p
        k3p = uh - (x + half * k2x)
        k4x = p + hr * k3p
        k4p = u1 - (x + hr * k3x)
        x = x + hr / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        p = p + hr / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p)
        xs[:, k + 1] = x
        ps[:, k + 1] = p
    return xs, ps


def objective(controls, t0, T, eps, steps, quad_points, x0=0.0, p0=0.0):
    controls = np.atleast_2d(np.asarray(controls, dtype=float))
    n = controls.shape[1]
    tq = _uniform(t0, T, quad_points)
    hq = (T - t0) / (quad_points - 1)
    xs, _ = integrate(controls, t0, T, steps, x0, p0)
    xq = CubicSpline(_uniform(t0, T, steps + 1), xs, axis=1, bc_type="not-a-knot")(tq)
    if n == quad_points:
        uq = controls
    else:
        uq = CubicSpline(_uniform(t0, T, n), controls, axis=1, bc_type="not-a-knot")(tq)
    ud = np.gradient(uq, hq, axis=1)
    return trapezoid(xq + 0.5 * uq**2 + 0.5 * eps * ud**2, dx=hq, axis=1)


def jacobi_eigh(a_in, tol_rel=1e-14, max_sweeps=50):
    a = np.array(a_in, dtype=float, copy=True)
    n = a.shape[0]
    v = np.eye(n)
    thresh = tol_rel * np.linalg.norm(a)
    sweep = 0
    offmask = ~np.eye(n, dtype=bool)
    while True:
        # summed directly; ||A||^2 - ||diag||^2 cancels near convergence
        off = float(np.sqrt(np.sum(a[offmask] ** 2)))
        if off <= thresh:
            return np.diag(a).copy(), v, sweep, off, True
        if sweep >= max_sweeps:
            return np.diag(a).copy(), v, sweep, off, False
        sweep += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                    if theta < 0.0:
                        t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                tau = s / (1.0 + c)
                app = a[p, p] - t * apq
                aqq = a[q, q] + t * apq
                g = a[:, p].copy()
                h = a[:, q].copy()
                a[:, p] = g - s * (h + g * tau)
                a[:, q] = h + s * (g - h * tau)
                a[p, :] = a[:, p]
                a[q, :] = a[:, q]
                a[p, p] = app
                a[q, q] = aqq
                a[p, q] = a[q, p] = 0.0
                g = v[:, p].copy()
                h = v[:, q].copy()
                v[:, p] = g - s * (h + g * tau)
                v[:, q] = h + s * (g - h * tau)
