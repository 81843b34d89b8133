import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tikreg.analytic import ControlProblem, optimal_control, optimal_objective, optimal_state
from tikreg.errors import InvalidInputError, NumericFailure
from tikreg.simulate import (
    ControlSignal,
    Trajectory,
    cubic_spline,
    derivative_fd,
    evaluate_objective,
    integrate_states,
    objective_batch,
)

PI = math.pi
GRID = np.linspace(0, PI, 1000)


def signal(values):
    return ControlSignal(GRID, values)


# -- ControlSignal ----------------------------------------------------------


def test_signal_reproduces_knots_exactly():
    v = np.random.default_rng(0).normal(size=GRID.size)
    u = signal(v)
    np.testing.assert_array_equal(u(GRID), v)


def test_signal_is_frozen():
    u = signal(np.sin(GRID))
    with pytest.raises(ValueError):
        u.values[3] = 1.0


@pytest.mark.parametrize(
    "grid",
    [np.linspace(0, 1, 3), np.array([0.0, 0.1, 0.3, 0.4]), np.array([0.0, 0.0, 1.0, 2.0])],
)
def test_signal_rejects_bad_grids(grid):
    with pytest.raises(InvalidInputError):
        ControlSignal(grid, np.zeros_like(grid))


def test_signal_shape_mismatch():
    with pytest.raises(InvalidInputError):
        ControlSignal(GRID, np.zeros(10))


def test_signal_must_span_horizon():
    u = ControlSignal(np.linspace(0, 1, 10), np.zeros(10))
    with pytest.raises(InvalidInputError):
        integrate_states(u, ControlProblem(1.0))


# -- integrate_states --------------------------------------------------------


def test_zero_control_rest():
    traj = integrate_states(signal(np.zeros_like(GRID)), ControlProblem(1.0))
    assert np.all(traj.x == 0) and np.all(traj.p == 0)
    assert traj.grid.size == 2001


def test_resonance():
    traj = integrate_states(signal(np.sin(GRID)), ControlProblem(1.0))
    t = traj.grid
    np.testing.assert_allclose(traj.x, (np.sin(t) - t * np.cos(t)) / 2, atol=1e-9)
    assert traj.x[-1] == pytest.approx(PI / 2, abs=1e-9)
    assert traj.x[0] == 0 and traj.p[0] == 0


def test_optimal_control_reproduces_state():
    traj = integrate_states(signal(optimal_control(GRID, 1.0)), ControlProblem(1.0))
    assert np.max(np.abs(traj.x - optimal_state(traj.grid, 1.0))) <= 1e-6
    assert np.max(np.abs(traj.position(GRID) - optimal_state(GRID, 1.0))) <= 1e-6


def test_integrator_fourth_order():
    u = signal(np.sin(GRID))
    errs = [abs(integrate_states(u, ControlProblem(1.0), steps=n).x[-1] - PI / 2) for n in (32, 64, 128)]
    for a, b in zip(errs, errs[1:]):
        assert 14 <= a / b <= 18


def test_energy_conserved_unforced():
    traj = integrate_states(signal(np.zeros_like(GRID)), ControlProblem(0.0, x0=1.0))
    assert np.max(np.abs(traj.x**2 + traj.p**2 - 1.0)) <= 1e-8


def test_nonfinite_control_names_time():
    v = np.sin(GRID)
    v[300] = np.nan
    with pytest.raises(NumericFailure) as info:
        integrate_states(signal(v), ControlProblem(1.0))
    assert info.value.time == pytest.approx(GRID[300])
    assert f"{GRID[300]:.6g}" in str(info.value)


def test_steps_validation():
    with pytest.raises(InvalidInputError):
        integrate_states(signal(np.sin(GRID)), ControlProblem(1.0), steps=8)


def test_trajectory_lengths_checked():
    with pytest.raises(InvalidInputError):
        Trajectory(np.arange(3.0), np.zeros(3), np.zeros(4))


# -- evaluate_objective ---------------------------------------------------------


def test_objective_zero_control():
    assert evaluate_objective(signal(np.zeros_like(GRID)), ControlProblem(1.0)) == 0.0


def test_objective_resonance_closed_form():
    J = evaluate_objective(signal(np.sin(GRID)), ControlProblem(1.0))
    assert J == pytest.approx(2 + PI / 2, abs=1e-4)


@pytest.mark.parametrize("eps", [1.0, 0.04])
def test_objective_optimal_control(eps):
    J = evaluate_objective(signal(optimal_control(GRID, eps)), ControlProblem(eps))
    assert J == pytest.approx(optimal_objective(eps), abs=1e-4)
    # J* is the minimum; quadrature error is the only way below it
    assert J >= optimal_objective(eps) - 1e-4


@pytest.mark.parametrize("values", [np.sin(GRID), optimal_control(GRID, 1.0)])
@pytest.mark.parametrize("eps", [1.0, 0.04])
def test_quadrature_convergence(values, eps):
    u, pb = signal(values), ControlProblem(eps)
    assert abs(evaluate_objective(u, pb, 1000) - evaluate_objective(u, pb, 4000)) <= 1e-5


def test_quadrature_second_order_in_layer():
    # u*(., 0.04) carries a boundary layer; the end differences make the
    # quadrature O(h^2) there, so 1000 vs 4000 differs by about 1.5e-5
    u, pb = signal(optimal_control(GRID, 0.04)), ControlProblem(0.04)
    J = [evaluate_objective(u, pb, q) for q in (1000, 2000, 4000, 8000)]
    d = np.diff(J)
    assert 3.5 <= d[0] / d[1] <= 4.5 and 3.5 <= d[1] / d[2] <= 4.5
    assert abs(J[0] - J[2]) <= 2e-5


def test_objective_quad_points_validation():
    with pytest.raises(InvalidInputError):
        evaluate_objective(signal(np.sin(GRID)), ControlProblem(1.0), quad_points=32)


def test_objective_deterministic():
    rng = np.random.default_rng(11)
    u = signal(np.convolve(rng.normal(size=GRID.size), np.ones(50) / 50, mode="same"))
    a = evaluate_objective(u, ControlProblem(0.04))
    b = evaluate_objective(u, ControlProblem(0.04))
    assert a == b


def test_batch_matches_single():
    rows = np.stack([np.sin(GRID), optimal_control(GRID, 1.0), np.zeros_like(GRID)])
    pb = ControlProblem(1.0)
    got = objective_batch(rows, pb)
    ref = [evaluate_objective(signal(r), pb) for r in rows]
    np.testing.assert_allclose(got, ref, rtol=1e-14, atol=0)


# -- derivative_fd / cubic_spline ------------------------------------------------


def test_derivative_constant_and_ramp():
    assert np.all(derivative_fd(np.full(7, 3.2), 0.1) == 0)
    t = np.arange(9) * 0.5
    np.testing.assert_allclose(derivative_fd(1.5 - 2.0 * t, 0.5), -2.0, rtol=1e-15)


def test_derivative_sin():
    d = derivative_fd(np.sin(GRID), GRID[1] - GRID[0])
    assert np.max(np.abs(d - np.cos(GRID))[1:-1]) <= 1e-5


def test_derivative_too_short():
    with pytest.raises(InvalidInputError):
        derivative_fd([1.0, 2.0], 0.1)


@settings(max_examples=40, deadline=None)
@given(
    st.lists(st.floats(-3, 3), min_size=4, max_size=4),
    st.lists(st.floats(0.05, 1.0), min_size=5, max_size=5),
)
def test_spline_reproduces_cubics(coef, gaps):
    grid = np.concatenate([[0.0], np.cumsum(gaps)])
    p = np.polynomial.Polynomial(coef)
    s = cubic_spline(grid, p(grid))
    ts = np.linspace(grid[0], grid[-1], 57)
    np.testing.assert_allclose(s(ts), p(ts), atol=1e-10 * max(1.0, np.abs(p(ts)).max()))


def test_spline_cubic_example():
    g = np.linspace(-1, 2, 6)
    s = cubic_spline(g, g**3 - 2 * g)
    ts = np.array([-0.77, 0.123, 1.9])
    np.testing.assert_allclose(s(ts), ts**3 - 2 * ts, atol=1e-12)


def test_spline_sin_accuracy():
    g = np.linspace(0, PI, 50)
    ts = np.linspace(0, PI, 5001)
    assert np.max(np.abs(cubic_spline(g, np.sin(g))(ts) - np.sin(ts))) <= 1e-5


@pytest.mark.parametrize("grid", [np.array([0.0, 1.0, 2.0]), np.array([0.0, 1.0, 1.0, 2.0])])
def test_spline_errors(grid):
    with pytest.raises(InvalidInputError):
        cubic_spline(grid, np.zeros_like(grid))
