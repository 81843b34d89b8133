"""Differential Evolution with per-dimension donor sampling.

For each member ``i`` and each coordinate ``j`` three distinct donors
``a, b, c`` (all different from ``i``) are drawn afresh, and the trial
coordinate is ``a_j + F (b_j - c_j)`` with probability ``CR``, else the
member's own coordinate. The textbook DE/rand/1/bin (one donor trio per
member plus a forced crossover coordinate) is available as
``variant="rand1bin"``.

Random stream (numpy PCG64 seeded with ``seed``), in order:

1. ``ND`` uniforms for the amplitude limits ``l_j = (2r - 1) / j^2``;
2. ``ND * NP`` uniforms, row-major over (j, i), for ``pop[j, i] = l_j (2r - 1)``;
3. per generation, ``NP * ND * 4`` uniforms ordered (member, dimension, slot):
   slots 0-2 pick the donors, slot 3 is the crossover draw. ``rand1bin``
   then draws ``NP`` more uniforms for the forced coordinate.

Donors are drawn without rejection: slot k maps to the ``floor(r * (NP-1-k))``-th
index not yet taken, so every generation consumes a fixed number of draws.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidInputError

VARIANTS = ("per-dimension", "rand1bin")


@dataclass(frozen=True)
class DEConfig:
    F: float = 0.8
    CR: float = 0.7
    NP: int = 120
    Nmax: int = 300
    ND: int = 12
    seed: int = 0
    variant: str = "per-dimension"

    def __post_init__(self):
        if not 0 < self.F <= 2:
            raise InvalidInputError(f"F must be in (0, 2], got {self.F}")
        if not 0 <= self.CR <= 1:
            raise InvalidInputError(f"CR must be in [0, 1], got {self.CR}")
        if self.NP < 4:
            raise InvalidInputError(f"NP must be >= 4, got {self.NP}")
        if self.ND < 1:
            raise InvalidInputError(f"ND must be >= 1, got {self.ND}")
        if self.Nmax < 0:
            raise InvalidInputError(f"Nmax must be >= 0, got {self.Nmax}")
        if not 0 <= self.seed < 2**64:
            raise InvalidInputError("seed must be a 64-bit unsigned integer")
        if self.variant not in VARIANTS:
            raise InvalidInputError(f"variant must be one of {VARIANTS}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class OptimResult:
    best_coeffs: np.ndarray
    best_value: float
    history_values: np.ndarray
    history_coeffs: np.ndarray
    evaluations: int
    rejected: int = 0
    wall_seconds: np.ndarray = field(default_factory=lambda: np.zeros(0))
    status: str = "completed"
    method: str = "crab"


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def init_population(config: DEConfig, rng: np.random.Generator | None = None) -> np.ndarray:
    """Initial population, shape (ND, NP); row j lies within [-1/j^2, 1/j^2]."""
    rng = rng if rng is not None else make_rng(config.seed)
    j = np.arange(1, config.ND + 1, dtype=float)
    limits = (2.0 * rng.random(config.ND) - 1.0) / j**2
    r = rng.random((config.ND, config.NP))
    return limits[:, None] * (2.0 * r - 1.0)


def _nth_free(k, taken):
    """Map k in [0, NP - len(taken)) to the k-th index not in ``taken``."""
    v = k.copy()
    for e in np.sort(np.stack(taken), axis=0):
        v += v >= e
    return v


def draw_donors(r: np.ndarray, NP: int) -> np.ndarray:
    """Turn uniforms ``r[..., 0:3]`` for members ``i`` (axis 0) into donor indices."""
    lead = r.shape[:-1]
    i = np.broadcast_to(np.arange(NP).reshape((NP,) + (1,) * (len(lead) - 1)), lead)
    ka = np.minimum((r[..., 0] * (NP - 1)).astype(np.int64), NP - 2)
    kb = np.minimum((r[..., 1] * (NP - 2)).astype(np.int64), NP - 3)
    kc = np.minimum((r[..., 2] * (NP - 3)).astype(np.int64), NP - 4)
    a = _nth_free(ka, [i])
    b = _nth_free(kb, [i, a])
    c = _nth_free(kc, [i, a, b])
    return np.stack([a, b, c], axis=-1)


def _evaluate(objective, cands: np.ndarray, vectorized: bool) -> np.ndarray:
    if vectorized:
        vals = np.asarray(objective(cands), dtype=float)
    else:
        vals = np.array([objective(c) for c in cands], dtype=float)
    if vals.shape != (cands.shape[0],):
        raise InvalidInputError("objective returned the wrong number of values")
    return vals


def de_optimize(
    objective: Callable,
    config: DEConfig,
    vectorized: bool = False,
    callback: Callable | None = None,
) -> OptimResult:
    """Minimize ``objective`` over R^ND.

    With ``vectorized=True`` the objective takes an (n, ND) array and returns n
    values; all trial vectors of a generation are built before any is
    evaluated, so the random stream does not depend on how trials are scored.
    Non-finite objective values reject the trial and are counted in
    ``rejected``. ``callback(generation, best_value, best_coeffs)`` runs after
    every generation.
    """
    NP, ND = config.NP, config.ND
    rng = make_rng(config.seed)
    pop = np.ascontiguousarray(init_population(config, rng).T)  # (NP, ND)
    fpop = _evaluate(objective, pop, vectorized)
    rejected = int(np.count_nonzero(~np.isfinite(fpop)))
    fpop = np.where(np.isfinite(fpop), fpop, np.inf)
    evaluations = NP

    hist_v = np.empty(config.Nmax)
    hist_c = np.empty((config.Nmax, ND))
    walls = np.empty(config.Nmax)
    start = time.perf_counter()
    members = np.arange(NP)
    for gen in range(config.Nmax):
        r = rng.random((NP, ND, 4))
        if config.variant == "per-dimension":
            donors = draw_donors(r, NP)  # (NP, ND, 3)
            cols = np.arange(ND)[None, :]
            a = pop[donors[..., 0], cols]
            b = pop[donors[..., 1], cols]
            c = pop[donors[..., 2], cols]
            cross = r[..., 3] < config.CR
        else:
            donors = draw_donors(r[:, 0, :], NP)  # (NP, 3)
            a, b, c = (pop[donors[:, k]] for k in range(3))
            forced = np.minimum((rng.random(NP) * ND).astype(np.int64), ND - 1)
            cross = r[..., 3] < config.CR
            cross[members, forced] = True
        trial = np.where(cross, a + config.F * (b - c), pop)
        ftrial = _evaluate(objective, trial, vectorized)
        evaluations += NP
        finite = np.isfinite(ftrial)
        rejected += int(np.count_nonzero(~finite))
        better = finite & (ftrial < fpop)
        pop = np.where(better[:, None], trial, pop)
        fpop = np.where(better, ftrial, fpop)
        k = int(np.argmin(fpop))
        hist_v[gen] = fpop[k]
        hist_c[gen] = pop[k]
        walls[gen] = time.perf_counter() - start
        if callback is not None:
            callback(gen + 1, hist_v[gen], hist_c[gen])

    k = int(np.argmin(fpop))
    return OptimResult(
        best_coeffs=pop[k].copy(),
        best_value=float(fpop[k]) if math.isfinite(fpop[k]) else math.inf,
        history_values=hist_v,
        history_coeffs=hist_c,
        evaluations=evaluations,
        rejected=rejected,
        wall_seconds=walls,
        status="completed",
        method="de",
    )
