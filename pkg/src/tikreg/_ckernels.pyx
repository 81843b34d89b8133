# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: uniform-grid not-a-knot splines, RK4 simulation of the
forced oscillator, the batched trapezoidal objective and cyclic Jacobi.

Every function here has a numpy twin in ``_pykernels`` with the same
signature; ``tikreg.kernels`` picks one at import time.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, fabs
from libc.stdlib cimport malloc, free

cnp.import_array()


cdef void _nak_second_derivs(const double* y, Py_ssize_t n, double h,
                             double* m, double* cp, double* d) noexcept nogil:
    # Uniform spacing: the not-a-knot rows collapse to 6 m[1] = r[1] and
    # 6 m[n-2] = r[n-2]; the rest is a (4,1) tridiagonal system.
    cdef Py_ssize_t i
    cdef double scale = 6.0 / (h * h)
    cdef double denom
    m[1] = scale * (y[0] - 2.0 * y[1] + y[2]) / 6.0
    m[n - 2] = scale * (y[n - 3] - 2.0 * y[n - 2] + y[n - 1]) / 6.0
    if n > 4:
        for i in range(2, n - 2):
            d[i] = scale * (y[i - 1] - 2.0 * y[i] + y[i + 1])
        d[2] -= m[1]
        d[n - 3] -= m[n - 2]
        cp[2] = 0.25
        d[2] = d[2] * 0.25
        for i in range(3, n - 2):
            denom = 4.0 - cp[i - 1]
            cp[i] = 1.0 / denom
            d[i] = (d[i] - d[i - 1]) / denom
        m[n - 3] = d[n - 3]
        for i in range(n - 4, 1, -1):
            m[i] = d[i] - cp[i] * m[i + 1]
    m[0] = 2.0 * m[1] - m[2]
    m[n - 1] = 2.0 * m[n - 2] - m[n - 3]


cdef inline double _nak_eval(const double* y, const double* m, Py_ssize_t n,
                             double t0, double h, double t) noexcept nogil:
    cdef double pos = (t - t0) / h
    cdef Py_ssize_t k = <Py_ssize_t>pos
    cdef double s, b
    if pos < 0.0:
        k = 0
    if k > n - 2:
        k = n - 2
    s = t - (t0 + k * h)
    b = (y[k + 1] - y[k]) / h - h * (2.0 * m[k] + m[k + 1]) / 6.0
    return y[k] + s * (b + s * (0.5 * m[k] + s * (m[k + 1] - m[k]) / (6.0 * h)))


cdef void _rk4(const double* y, const double* m, Py_ssize_t n, double t0,
               double hc, double T, Py_ssize_t steps, double x0, double p0,
               double* xs, double* ps) noexcept nogil:
    cdef double hr = (T - t0) / steps
    cdef double half = 0.5 * hr
    cdef double x = x0, p = p0
    cdef double u0, uh, u1, tk
    cdef double k1x, k1p, k2x, k2p, k3x, k3p, k4x, k4p
    cdef Py_ssize_t k
    xs[0] = x
    ps[0] = p
    u1 = _nak_eval(y, m, n, t0, hc, t0)
    for k in range(steps):
        tk = t0 + k * hr
        u0 = u1
        uh = _nak_eval(y, m, n, t0, hc, tk + half)
        u1 = _nak_eval(y, m, n, t0, hc, t0 + (k + 1) * hr)
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
        xs[k + 1] = x
        ps[k + 1] = p


def spline_eval(const double[::1] y, double t0, double T, const double[::1] ts):
    """Evaluate the not-a-knot spline through ``y`` (uniform on [t0, T]) at ``ts``."""
    cdef Py_ssize_t n = y.shape[0]
    cdef Py_ssize_t q = ts.shape[0]
    cdef double h = (T - t0) / (n - 1)
    cdef Py_ssize_t i
    m = np.empty(n)
    work = np.empty((2, n))
    out = np.empty(q)
    cdef double[::1] mv = m
    cdef double[:, ::1] wv = work
    cdef double[::1] ov = out
    with nogil:
        _nak_second_derivs(&y[0], n, h, &mv[0], &wv[0, 0], &wv[1, 0])
        for i in range(q):
            ov[i] = _nak_eval(&y[0], &mv[0], n, t0, h, ts[i])
    return out


def integrate(const double[:, ::1] controls, double t0, double T, Py_ssize_t steps,
              double x0=0.0, double p0=0.0):
    """RK4 trajectories (x, p), each of shape (batch, steps + 1)."""
    cdef Py_ssize_t nb = controls.shape[0]
    cdef Py_ssize_t n = controls.shape[1]
    cdef double hc = (T - t0) / (n - 1)
    cdef Py_ssize_t b
    xs = np.empty((nb, steps + 1))
    ps = np.empty((nb, steps + 1))
    work = np.empty((3, n))
    cdef double[:, ::1] xv = xs
    cdef double[:, ::1] pv = ps
    cdef double[:, ::1] wv = work
    with nogil:
        for b in range(nb):
            _nak_second_derivs(&controls[b, 0], n, hc, &wv[0, 0], &wv[1, 0], &wv[2, 0])
            _rk4(&controls[b, 0], &wv[0, 0], n, t0, hc, T, steps, x0, p0,
                 &xv[b, 0], &pv[b, 0])
    return xs, ps


def objective(const double[:, ::1] controls, double t0, double T, double eps,
              Py_ssize_t steps, Py_ssize_t quad_points, double x0=0.0, double p0=0.0):
    """Trapezoidal J = int(x + u^2/2 + eps/2 udot^2) for each control row.

    Rows are samples on a uniform grid over [t0, T]; u and x are splined onto
    a uniform quadrature grid and udot is the central/one-sided difference.
    """
    cdef Py_ssize_t nb = controls.shape[0]
    cdef Py_ssize_t n = controls.shape[1]
    cdef Py_ssize_t q = quad_points
    cdef double hc = (T - t0) / (n - 1)
    cdef double hq = (T - t0) / (q - 1)
    cdef double hr = (T - t0) / steps
    cdef Py_ssize_t b, i
    cdef bint same_grid = n == q
    cdef double acc, f, ud, tq
    out = np.empty(nb)
    cdef double[::1] ov = out
    cdef Py_ssize_t wlen = max(n, steps + 1)
    cdef double* buf = <double*>malloc((3 * wlen + 2 * (steps + 1) + 2 * q) * sizeof(double))
    if buf == NULL:
        raise MemoryError()
    cdef double* m = buf
    cdef double* cp = buf + wlen
    cdef double* d = buf + 2 * wlen
    cdef double* xs = buf + 3 * wlen
    cdef double* ps = xs + (steps + 1)
    cdef double* uq = ps + (steps + 1)
    cdef double* xq = uq + q
    try:
        with nogil:
            for b in range(nb):
                _nak_second_derivs(&controls[b, 0], n, hc, m, cp, d)
                _rk4(&controls[b, 0], m, n, t0, hc, T, steps, x0, p0, xs, ps)
                for i in range(q):
                    if same_grid:
                        uq[i] = controls[b, i]
                    else:
                        tq = t0 + i * hq if i < q - 1 else T
                        uq[i] = _nak_eval(&controls[b, 0], m, n, t0, hc, tq)
                _nak_second_derivs(xs, steps + 1, hr, m, cp, d)
                for i in range(q):
                    tq = t0 + i * hq if i < q - 1 else T
                    xq[i] = _nak_eval(xs, m, steps + 1, t0, hr, tq)
                acc = 0.0
                for i in range(q):
                    if i == 0:
                        ud = (uq[1] - uq[0]) / hq
                    elif i == q - 1:
                        ud = (uq[q - 1] - uq[q - 2]) / hq
                    else:
                        ud = (uq[i + 1] - uq[i - 1]) / (2.0 * hq)
                    f = xq[i] + 0.5 * uq[i] * uq[i] + 0.5 * eps * ud * ud
                    if i == 0 or i == q - 1:
                        acc += 0.5 * f
                    else:
                        acc += f
                ov[b] = acc * hq
    finally:
        free(buf)
    return out


def jacobi_eigh(const double[:, ::1] a_in, double tol_rel=1e-14, int max_sweeps=50):
    """Cyclic Jacobi. Returns (diag, V, sweeps, off_norm, converged); unsorted."""
    cdef Py_ssize_t n = a_in.shape[0]
    a_np = np.array(a_in, dtype=np.float64, copy=True)
    v_np = np.eye(n)
    cdef double[:, ::1] a = a_np
    cdef double[:, ::1] v = v_np
    cdef Py_ssize_t p, q, r
    cdef double fro = 0.0, off = 0.0, thresh
    cdef double apq, theta, t, c, s, tau, g, hh
    cdef int sweep = 0
    cdef bint converged = False
    with nogil:
        for p in range(n):
            for q in range(n):
                fro += a[p, q] * a[p, q]
        fro = sqrt(fro)
        thresh = tol_rel * fro
        while True:
            off = 0.0
            for p in range(n):
                for q in range(n):
                    if p != q:
                        off += a[p, q] * a[p, q]
            off = sqrt(off)
            if off <= thresh:
                converged = True
                break
            if sweep >= max_sweeps:
                break
            sweep += 1
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                    if fabs(theta) > 1e150:
                        t = 0.5 / theta
                    else:
                        t = 1.0 / (fabs(theta) + sqrt(theta * theta + 1.0))
                        if theta < 0.0:
                            t = -t
                    c = 1.0 / sqrt(t * t + 1.0)
                    s = t * c
                    tau = s / (1.0 + c)
                    a[p, p] -= t * apq
                    a[q, q] += t * apq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for r in range(n):
                        if r != p and r != q:
                            g = a[r, p]
                            hh = a[r, q]
                            a[r, p] = g - s * (hh + g * tau)
                            a[r, q] = hh + s * (g - hh * tau)
                            a[p, r] = a[r, p]
                            a[q, r] = a[r, q]
                    for r in range(n):
                        g = v[r, p]
                        hh = v[r, q]
                        v[r, p] = g - s * (hh + g * tau)
                        v[r, q] = hh + s * (g - hh * tau)
    return np.diag(a_np).copy(), v_np, sweep, off, converged
