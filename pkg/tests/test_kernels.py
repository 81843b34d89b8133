import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.interpolate import CubicSpline

from tikreg import _pykernels, kernels

from conftest import _ckernels

T = math.pi


def test_backend_selected():
    assert kernels.BACKEND in ("cython", "python")
    if _ckernels is not None:
        assert kernels.BACKEND == "cython" or kernels._force_python


@pytest.mark.parametrize("n", [4, 5, 6, 17, 200])
def test_spline_matches_scipy_not_a_knot(backend, n):
    rng = np.random.default_rng(n)
    y = rng.normal(size=n)
    ts = np.concatenate([rng.uniform(0, T, 300), np.linspace(0, T, n)])
    ref = CubicSpline(np.linspace(0, T, n), y, bc_type="not-a-knot")(ts)
    got = backend.spline_eval(np.ascontiguousarray(y), 0.0, T, ts)
    np.testing.assert_allclose(got, ref, rtol=0, atol=1e-12 * max(1, np.abs(y).max()))


def test_spline_reproduces_cubics(backend):
    t = np.linspace(0.0, T, 6)
    y = t**3 - 2 * t
    ts = np.random.default_rng(0).uniform(0, T, 100)
    got = backend.spline_eval(np.ascontiguousarray(y), 0.0, T, ts)
    np.testing.assert_allclose(got, ts**3 - 2 * ts, atol=1e-12)


def test_rk4_resonance(backend):
    t = np.linspace(0, T, 1000)
    u = np.sin(t)[None, :]
    xs, ps = backend.integrate(np.ascontiguousarray(u), 0.0, T, 2000)
    grid = np.linspace(0, T, 2001)
    np.testing.assert_allclose(xs[0], (np.sin(grid) - grid * np.cos(grid)) / 2, atol=1e-9)
    np.testing.assert_allclose(ps[0], grid * np.sin(grid) / 2, atol=1e-9)


def test_backends_agree_on_objective():
    if _ckernels is None:
        pytest.skip("extension not built")
    rng = np.random.default_rng(3)
    for n in (15, 1000):
        U = rng.normal(size=(5, n))
        U[:, 0] = U[:, -1] = 0
        a = _ckernels.objective(np.ascontiguousarray(U), 0.0, T, 0.04, 2000, 1000)
        b = _pykernels.objective(U, 0.0, T, 0.04, 2000, 1000)
        np.testing.assert_allclose(a, b, rtol=1e-11, atol=1e-11)


def test_objective_batch_equals_rows(backend):
    rng = np.random.default_rng(4)
    U = np.ascontiguousarray(rng.normal(size=(4, 15)))
    full = backend.objective(U, 0.0, T, 1.0, 400, 200)
    single = [backend.objective(np.ascontiguousarray(U[i : i + 1]), 0.0, T, 1.0, 400, 200)[0] for i in range(4)]
    if backend is _ckernels:
        np.testing.assert_array_equal(full, single)
    else:
        # scipy's batched spline solve may round differently in the last bit
        np.testing.assert_allclose(full, single, rtol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=9), st.integers(min_value=0, max_value=2**31))
def test_jacobi_matches_eigh(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n))
    A = np.ascontiguousarray(M + M.T)
    ref = np.linalg.eigvalsh(A)
    for mod in (_pykernels, _ckernels):
        if mod is None:
            continue
        w, V, sweeps, off, ok = mod.jacobi_eigh(A, 1e-14, 50)
        assert ok
        np.testing.assert_allclose(np.sort(w), ref, atol=1e-12 * max(1, np.abs(ref).max()))
        np.testing.assert_allclose(V.T @ V, np.eye(n), atol=1e-12)


def test_jacobi_reports_nonconvergence(backend):
    A = np.ascontiguousarray(np.random.default_rng(0).normal(size=(12, 12)))
    A = np.ascontiguousarray(A + A.T)
    w, V, sweeps, off, ok = backend.jacobi_eigh(A, 1e-14, 1)
    assert not ok and sweeps == 1 and off > 0
