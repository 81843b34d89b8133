"""Tikhonov regularization of symmetric PSD matrices and first-order spectral
perturbation of their condition number.

The regularized problem is

    min_x  1/2 x^T A x - x^T b + eps/2 x^T D^T D x,

whose minimizer solves ``(A + eps D^T D) x = b``. For small ``eps`` each simple
eigenvalue moves as ``lambda0 + eps * lambda1`` with ``lambda1`` the Rayleigh
quotient of ``D^T D`` at the unperturbed eigenvector.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .errors import (
    DegenerateSpectrumError,
    InvalidInputError,
    NotPSDError,
    NumericFailure,
)

SINGULAR_TOL = 1e-14


def _frozen(a):
    a = np.array(a, dtype=float, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class SymMatrix:
    """Dense real symmetric matrix. Construction symmetrizes as (M + M^T)/2."""

    entries: np.ndarray
    max_asymmetry: float = 0.0

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] == 0:
            raise InvalidInputError(f"expected a non-empty square matrix, got shape {a.shape}")
        if not np.all(np.isfinite(a)):
            raise InvalidInputError("matrix has non-finite entries")
        asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
        object.__setattr__(self, "entries", _frozen(0.5 * (a + a.T)))
        object.__setattr__(self, "max_asymmetry", max(self.max_asymmetry, asym))

    @property
    def n(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.entries, dtype=dtype)


def example_matrix(mu: float) -> SymMatrix:
    """The nearly singular 2x2 test matrix [[1, 1], [1, 1 + mu]]."""
    return SymMatrix(np.array([[1.0, 1.0], [1.0, 1.0 + mu]]))


@dataclass(frozen=True)
class TikhonovOperator:
    """Regularizing operator D (rows x cols); the penalty is x^T D^T D x."""

    entries: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.entries, dtype=float)
        if d.ndim != 2 or d.shape[0] == 0 or d.shape[1] == 0:
            raise InvalidInputError(f"expected a non-empty 2-D operator, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise InvalidInputError("operator has non-finite entries")
        object.__setattr__(self, "entries", _frozen(d))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def gram(self) -> np.ndarray:
        g = self.entries.T @ self.entries
        return 0.5 * (g + g.T)


def build_forward_difference(n: int) -> TikhonovOperator:
    """(n+1) x n forward difference with both boundary rows kept.

    >>> build_forward_difference(2).entries.tolist()
    [[1.0, 0.0], [-1.0, 1.0], [0.0, -1.0]]
    """
    if int(n) != n or n < 1:
        raise InvalidInputError(f"forward difference needs n >= 1, got {n}")
    n = int(n)
    d = np.zeros((n + 1, n))
    idx = np.arange(n)
    d[idx, idx] = 1.0
    d[idx + 1, idx] = -1.0
    return TikhonovOperator(d)


@dataclass(frozen=True)
class EigenDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    sweeps: int = 0
    off_norm: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "eigenvalues", _frozen(self.eigenvalues))
        object.__setattr__(self, "eigenvectors", _frozen(self.eigenvectors))


def eigen_sym(A: SymMatrix, tol: float = 1e-14, max_sweeps: int = 50) -> EigenDecomposition:
    """Cyclic Jacobi eigendecomposition, eigenvalues ascending.

    Raises NumericFailure (with ``off_norm`` attached) if the off-diagonal
    Frobenius norm is still above ``tol * ||A||_F`` after ``max_sweeps``.
    """
    a = np.ascontiguousarray(A.entries, dtype=float)
    w, v, sweeps, off, converged = kernels.jacobi_eigh(a, tol, max_sweeps)
    if not converged:
        err = NumericFailure(
            f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})"
        )
        err.off_norm = off
        raise err
    order = np.argsort(w, kind="stable")
    return EigenDecomposition(w[order], v[:, order], sweeps, off)


def condition_number(A: SymMatrix, eig: EigenDecomposition | None = None) -> float:
    """lambda_max / lambda_min, or ``math.inf`` when lambda_min <= 1e-14 lambda_max."""
    eig = eig or eigen_sym(A)
    lmin, lmax = float(eig.eigenvalues[0]), float(eig.eigenvalues[-1])
    if lmin < -SINGULAR_TOL * max(1.0, lmax):
        raise NotPSDError(f"matrix is not positive semi-definite (lambda_min = {lmin:.3e})")
    if lmin <= SINGULAR_TOL * lmax:
        return math.inf
    return lmax / lmin


def _check_dims(A: SymMatrix, D: TikhonovOperator):
    if D.cols != A.n:
        raise InvalidInputError(f"operator has {D.cols} columns but matrix is {A.n}x{A.n}")


def regularize(A: SymMatrix, D: TikhonovOperator, eps: float) -> SymMatrix:
    _check_dims(A, D)
    if eps < 0:
        raise InvalidInputError(f"eps must be >= 0, got {eps}")
    if eps == 0:
        return A
    return SymMatrix(A.entries + eps * D.gram())


def ldl_solve(M: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Solve with an unpivoted LDL^T factorization; fails on a nonpositive pivot."""
    M = np.asarray(M, dtype=float)
    n = M.shape[0]
    L = np.eye(n)
    d = np.empty(n)
    for k in range(n):
        d[k] = M[k, k] - np.dot(L[k, :k] ** 2, d[:k])
        if not d[k] > 0:
            err = NumericFailure(
                f"matrix is not positive definite: pivot {k} is {d[k]:.3e}"
            )
            err.pivot = float(d[k])
            raise err
        if k + 1 < n:
            L[k + 1 :, k] = (M[k + 1 :, k] - L[k + 1 :, :k] @ (L[k, :k] * d[:k])) / d[k]
    y = np.empty(n)
    for k in range(n):
        y[k] = b[k] - np.dot(L[k, :k], y[:k])
    y /= d
    x = np.empty(n)
    for k in range(n - 1, -1, -1):
        x[k] = y[k] - np.dot(L[k + 1 :, k], x[k + 1 :])
    return x


def solve_regularized(A: SymMatrix, D: TikhonovOperator, eps: float, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    if b.shape != (A.n,):
        raise InvalidInputError(f"right-hand side has shape {b.shape}, expected ({A.n},)")
    return ldl_solve(regularize(A, D, eps).entries, b)


def quadratic_objective(A: SymMatrix, b, D: TikhonovOperator, eps: float, x) -> float:
    _check_dims(A, D)
    x = np.asarray(x, dtype=float)
    b = np.asarray(b, dtype=float)
    if x.shape != (A.n,) or b.shape != (A.n,):
        raise InvalidInputError("x and b must have length n")
    Dx = D.entries @ x
    return float(0.5 * x @ A.entries @ x - x @ b + 0.5 * eps * Dx @ Dx)


def first_order_shift(D: TikhonovOperator, v) -> float:
    """Rayleigh quotient v^T D^T D v / v^T v: the O(eps) eigenvalue shift."""
    v = np.asarray(v, dtype=float)
    vv = float(v @ v)
    if v.shape != (D.cols,):
        raise InvalidInputError(f"vector has shape {v.shape}, expected ({D.cols},)")
    if vv == 0.0:
        raise InvalidInputError("first-order shift undefined for the zero vector")
    Dv = D.entries @ v
    return float(Dv @ Dv) / vv


def tikhonov_gain(D: TikhonovOperator, eig: EigenDecomposition) -> float:
    """Smallest first-order shift over the eigenbasis (inner min of the max-min design problem)."""
    V = eig.eigenvectors
    if V.shape[0] != D.cols:
        raise InvalidInputError("eigenvectors and operator dimensions disagree")
    return min(first_order_shift(D, V[:, k]) for k in range(V.shape[1]))


def _ratio(num: float, den: float) -> float:
    if den <= SINGULAR_TOL * abs(num):
        return math.inf
    return num / den


@dataclass(frozen=True)
class PerturbationReport:
    epsilon: float
    lambda0_min: float
    lambda0_max: float
    lambda1_min: float
    lambda1_max: float
    predicted_condition: float
    exact_condition: float
    # lambda1 values assigned by size rather than by eigenbranch
    predicted_condition_swapped: float = math.nan
    n: int = 0
    mu: float | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def num(v):
            return v if v is None or math.isfinite(v) else None

        out = {"n": self.n}
        if self.mu is not None:
            out["mu"] = self.mu
        out.update(
            epsilon=self.epsilon,
            lambda0_min=self.lambda0_min,
            lambda0_max=self.lambda0_max,
            lambda1_min=self.lambda1_min,
            lambda1_max=self.lambda1_max,
            predicted_condition=num(self.predicted_condition),
            exact_condition=num(self.exact_condition),
            predicted_condition_swapped=num(self.predicted_condition_swapped),
        )
        out.update(self.extra)
        return out


def predict_condition(
    A: SymMatrix, D: TikhonovOperator, eps: float, mu: float | None = None
) -> PerturbationReport:
    """First-order prediction of cond(A + eps D^T D) next to the exact value.

    lambda1_min is the shift of the branch that starts at lambda0_min (and
    likewise for max). The size-ordered alternative is reported as
    ``predicted_condition_swapped``.
    """
    _check_dims(A, D)
    eig = eigen_sym(A)
    w = eig.eigenvalues
    fro = float(np.linalg.norm(A.entries))
    if A.n > 1 and np.min(np.diff(w)) <= 1e-12 * fro:
        raise DegenerateSpectrumError(
            f"eigenvalues are not simple (min gap {np.min(np.diff(w)):.3e}); "
            "the first-order formula does not apply"
        )
    l0min, l0max = float(w[0]), float(w[-1])
    l1min = first_order_shift(D, eig.eigenvectors[:, 0])
    l1max = first_order_shift(D, eig.eigenvectors[:, -1])
    base = condition_number(A, eig)
    if eps == 0:
        predicted = swapped = base
    else:
        predicted = _ratio(l0max + eps * l1max, l0min + eps * l1min)
        lo, hi = sorted((l1min, l1max))
        swapped = _ratio(l0max + eps * hi, l0min + eps * lo)
    exact = condition_number(regularize(A, D, eps))
    return PerturbationReport(
        epsilon=float(eps),
        lambda0_min=l0min,
        lambda0_max=l0max,
        lambda1_min=l1min,
        lambda1_max=l1max,
        predicted_condition=predicted,
        exact_condition=exact,
        predicted_condition_swapped=swapped,
        n=A.n,
        mu=mu,
    )


# -- file formats ------------------------------------------------------------


def parse_matrix(text: str) -> SymMatrix:
    """Parse "n" followed by n whitespace-separated rows; '#' starts a comment."""
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise InvalidInputError("empty matrix file")
    try:
        n = int(lines[0])
        rows = [[float(tok) for tok in ln.split()] for ln in lines[1:]]
    except ValueError as exc:
        raise InvalidInputError(f"malformed matrix file: {exc}") from None
    if n < 1 or len(rows) != n or any(len(r) != n for r in rows):
        raise InvalidInputError(f"expected {n} rows of {n} values")
    return SymMatrix(np.array(rows))


def format_matrix(A: SymMatrix) -> str:
    rows = [" ".join(repr(float(v)) for v in row) for row in A.entries]
    return "\n".join([str(A.n), *rows]) + "\n"


def read_matrix(path) -> SymMatrix:
    """Read either the plain-text format or its JSON wrapper ({"n", "entries", ...})."""
    text = Path(path).read_text()
    if text.lstrip().startswith("{"):
        doc = json.loads(text)
        A = SymMatrix(np.array(doc["entries"], dtype=float))
        if "n" in doc and doc["n"] != A.n:
            raise InvalidInputError(f"JSON says n={doc['n']} but entries are {A.n}x{A.n}")
        return A
    return parse_matrix(text)


def matrix_to_json(A: SymMatrix, **meta) -> str:
    doc = {"n": A.n, "entries": A.entries.tolist(), "max_asymmetry": A.max_asymmetry}
    doc.update(meta)
    return json.dumps(doc, indent=2)
