import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tikreg.de import DEConfig, de_optimize, draw_donors, init_population, make_rng
from tikreg.errors import InvalidInputError


def sphere(c):
    return float(np.sum(np.asarray(c) ** 2))


def sphere_batch(C):
    return np.sum(C**2, axis=1)


@pytest.mark.parametrize(
    "kwargs",
    [{"F": 0.0}, {"F": 2.5}, {"CR": -0.1}, {"CR": 1.1}, {"NP": 3}, {"ND": 0}, {"Nmax": -1},
     {"seed": -1}, {"variant": "best1"}],
)
def test_config_validation(kwargs):
    with pytest.raises(InvalidInputError):
        DEConfig(**kwargs)


def test_config_defaults():
    c = DEConfig()
    assert (c.F, c.CR, c.NP, c.Nmax, c.ND) == (0.8, 0.7, 120, 300, 12)


def test_init_population_bounds():
    pop = init_population(DEConfig(seed=5))
    assert pop.shape == (12, 120)
    j = np.arange(1, 13)[:, None]
    assert np.all(np.abs(pop) <= 1.0 / j**2)
    assert np.all(np.abs(pop[11]) <= 1 / 144)


def test_init_population_stream_order():
    cfg = DEConfig(NP=5, ND=3, seed=9)
    r = make_rng(9).random(3 + 15)
    limits = (2 * r[:3] - 1) / np.arange(1, 4) ** 2
    expected = limits[:, None] * (2 * r[3:].reshape(3, 5) - 1)
    np.testing.assert_array_equal(init_population(cfg), expected)


def test_init_population_deterministic():
    a = init_population(DEConfig(seed=123))
    b = init_population(DEConfig(seed=123))
    np.testing.assert_array_equal(a, b)
    assert not np.array_equal(a, init_population(DEConfig(seed=124)))


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 40), st.integers(0, 2**32))
def test_donors_distinct(NP, seed):
    r = np.random.default_rng(seed).random((NP, 7, 3))
    # include the extreme uniforms that the floor mapping must handle
    r[0, 0] = [0.0, 0.0, 0.0]
    r[-1, -1] = [1 - 2**-53] * 3
    d = draw_donors(r, NP)
    i = np.arange(NP)[:, None]
    a, b, c = d[..., 0], d[..., 1], d[..., 2]
    assert np.all((a != i) & (b != i) & (c != i))
    assert np.all((a != b) & (a != c) & (b != c))
    assert d.min() >= 0 and d.max() < NP


def test_donors_cover_all_candidates():
    NP = 6
    r = np.random.default_rng(0).random((NP, 4000, 3))
    d = draw_donors(r, NP)
    for i in range(NP):
        assert set(np.unique(d[i])) == set(range(NP)) - {i}


def test_evaluation_count_and_history():
    cfg = DEConfig(Nmax=50, seed=1)
    res = de_optimize(sphere, cfg)
    assert res.evaluations == cfg.NP + cfg.NP * cfg.Nmax
    assert res.history_values.shape == (50,) and res.history_coeffs.shape == (50, 12)
    assert np.all(np.diff(res.history_values) <= 0)
    assert res.best_value == res.history_values[-1]
    assert sphere(res.best_coeffs) == res.best_value


def test_default_evaluation_count():
    res = de_optimize(sphere_batch, DEConfig(seed=0), vectorized=True)
    assert res.evaluations == 120 + 36000


def test_vectorized_matches_scalar():
    cfg = DEConfig(Nmax=40, seed=7)
    a = de_optimize(sphere, cfg)
    b = de_optimize(sphere_batch, cfg, vectorized=True)
    np.testing.assert_array_equal(a.best_coeffs, b.best_coeffs)
    np.testing.assert_array_equal(a.history_values, b.history_values)


@pytest.mark.parametrize("variant", ["per-dimension", "rand1bin"])
def test_seeded_determinism(variant):
    cfg = DEConfig(Nmax=30, seed=42, variant=variant)
    a = de_optimize(sphere_batch, cfg, vectorized=True)
    b = de_optimize(sphere_batch, cfg, vectorized=True)
    np.testing.assert_array_equal(a.best_coeffs, b.best_coeffs)
    np.testing.assert_array_equal(a.history_values, b.history_values)
    np.testing.assert_array_equal(a.history_coeffs, b.history_coeffs)


def test_cr_zero_keeps_population():
    seen = []

    def record(C):
        seen.append(C.copy())
        return sphere_batch(C)

    cfg = DEConfig(CR=0.0, Nmax=5, NP=10, ND=4, seed=3)
    res = de_optimize(record, cfg, vectorized=True)
    for trial in seen[1:]:
        np.testing.assert_array_equal(trial, seen[0])
    assert res.history_values[0] == res.history_values[-1]


def test_nonfinite_trials_rejected():
    def f(C):
        v = sphere_batch(C)
        v[::3] = np.nan
        return v

    res = de_optimize(f, DEConfig(Nmax=10, NP=12, ND=3, seed=0), vectorized=True)
    assert res.rejected == 4 * 11
    assert np.isfinite(res.best_value)


def test_objective_wrong_length():
    with pytest.raises(InvalidInputError):
        de_optimize(lambda C: np.zeros(2), DEConfig(Nmax=1, NP=5, ND=2), vectorized=True)


def test_callback_sees_each_generation():
    calls = []
    de_optimize(sphere_batch, DEConfig(Nmax=7, seed=0), vectorized=True,
                callback=lambda g, v, c: calls.append((g, v)))
    assert [g for g, _ in calls] == list(range(1, 8))


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_sphere_converges(seed):
    res = de_optimize(sphere_batch, DEConfig(seed=seed), vectorized=True)
    assert res.best_value <= 1e-6


def test_rand1bin_sphere():
    res = de_optimize(sphere_batch, DEConfig(seed=0, variant="rand1bin"), vectorized=True)
    assert res.best_value <= 1e-5
