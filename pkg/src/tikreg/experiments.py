"""The two studies as reproducible commands writing CSV/JSON/SVG artifacts."""

from __future__ import annotations

import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, kernels
from .analytic import (
    JLIMIT,
    ControlProblem,
    limit_functions,
    optimal_control,
    optimal_objective,
    optimal_state,
)
from .crab import CrabBasis, crab_solve
from .de import DEConfig
from .direct import DirectConfig, direct_solve
from .errors import InvalidInputError
from .io import atomic_write_text, write_columns, write_csv, write_json
from .matrix_lab import (
    build_forward_difference,
    example_matrix,
    predict_condition,
    quadratic_objective,
    read_matrix,
    solve_regularized,
)
from .simulate import DEFAULT_QUAD_POINTS, DEFAULT_STEPS, ControlSignal, integrate_states
from .svgplot import line_plot

METHODS = ("exact", "crab", "direct")


@dataclass
class RunReport:
    command: str
    parameters: dict
    outputs: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)
    versions: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)
    results: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "parameters": self.parameters,
            "outputs": [str(p) for p in self.outputs],
            "timings": self.timings,
            "versions": self.versions,
            "warnings": self.warnings,
            "results": self.results,
        }

    def finish(self, out_dir: Path) -> "RunReport":
        path = out_dir / "run_report.json"
        self.outputs.append(path)
        write_json(path, self.to_dict())
        return self


def _versions(seed=None) -> dict:
    out = {"tikreg": __version__, "backend": kernels.BACKEND}
    if seed is not None:
        out["seed"] = seed
    return out


# -- matrix study ------------------------------------------------------------


def cmd_matrix_demo(mu: float = 1e-6, eps: float = 0.01, out_dir=".", matrix_path=None) -> RunReport:
    """Conditioning of A(mu) = [[1, 1], [1, 1 + mu]] under the forward-difference
    regularizer, and the regularized solve with b = (1/2, 1/2)."""
    out_dir = Path(out_dir)
    if eps < 0:
        raise InvalidInputError("eps must be >= 0")
    report = RunReport("matrix-demo", {"mu": mu, "eps": eps}, versions=_versions())
    t = time.perf_counter()
    if matrix_path is not None:
        A = read_matrix(matrix_path)
        report.parameters["matrix"] = str(matrix_path)
        mu = None
    else:
        if not mu > 0:
            raise InvalidInputError("mu must be > 0")
        A = example_matrix(mu)
    D = build_forward_difference(A.n)
    pert = predict_condition(A, D, eps, mu=mu)
    report.timings["perturbation"] = time.perf_counter() - t

    doc = pert.to_dict()
    doc["pairings"] = {
        "by_eigenbranch": pert.predicted_condition,
        "by_size": pert.predicted_condition_swapped,
    }
    path = out_dir / "perturbation_report.json"
    write_json(path, doc)
    report.outputs.append(path)

    t = time.perf_counter()
    b = np.full(A.n, 0.5)
    x_unreg = solve_regularized(A, D, 0.0, b)
    x_reg = solve_regularized(A, D, eps, b)
    J_unreg = quadratic_objective(A, b, D, 0.0, x_unreg)
    J_reg = quadratic_objective(A, b, D, 0.0, x_reg)
    resid = A.entries @ x_reg - b
    solution = {
        "b": b,
        "epsilon": eps,
        "x_unreg": x_unreg,
        "x_reg": x_reg,
        # candidate meanings of "residual" of the regularized solution
        "residuals": {
            "objective_at_x_reg": J_reg,
            "objective_gap": J_reg - J_unreg,
            "equation_residual_norm": float(np.linalg.norm(resid)),
            "equation_residual_norm_squared": float(resid @ resid),
        },
    }
    report.timings["solve"] = time.perf_counter() - t
    path = out_dir / "solution.json"
    write_json(path, solution)
    report.outputs.append(path)
    report.results = {
        "condition_A": pert.predicted_condition if eps == 0 else None,
        "exact_condition": pert.exact_condition,
        "predicted_condition": pert.predicted_condition,
        "predicted_condition_swapped": pert.predicted_condition_swapped,
        "x_reg": x_reg,
    }
    return report.finish(out_dir)


# -- control study -----------------------------------------------------------


def _reference(eps: float, t):
    """Closed-form u*, x*, J* (or their eps -> 0 limits when eps == 0)."""
    if eps > 0:
        return optimal_control(t, eps), optimal_state(t, eps), optimal_objective(eps)
    u, x = limit_functions(t)
    return u, x, JLIMIT


def _safe_plot(report: RunReport, path: Path, *args, **kwargs):
    try:
        atomic_write_text(path, line_plot(*args, **kwargs))
        report.outputs.append(path)
    except Exception as exc:  # plots must never take the data down with them
        report.warnings.append(f"plot {path.name} failed: {exc}")


def cmd_ocp(
    method: str,
    eps: float,
    seed: int = 0,
    out_dir=".",
    quad_points: int = DEFAULT_QUAD_POINTS,
    modes: int = 12,
    de: dict | None = None,
    steps: int = DEFAULT_STEPS,
    nodes: int = 15,
) -> RunReport:
    out_dir = Path(out_dir)
    if method not in METHODS:
        raise InvalidInputError(f"method must be one of {METHODS}")
    if method == "exact" and not eps > 0:
        raise InvalidInputError("method=exact needs eps > 0")
    if eps < 0:
        raise InvalidInputError("eps must be >= 0")
    if quad_points < 64 or steps < 16:
        raise InvalidInputError("need quad_points >= 64 and steps >= 16")
    params = {"method": method, "eps": eps, "seed": seed, "quad_points": quad_points, "steps": steps}
    report = RunReport("ocp", params, versions=_versions(seed))
    problem = ControlProblem(eps)
    t_q = np.linspace(problem.t0, problem.T, quad_points)
    u_ref, x_ref, J_ref = _reference(eps, t_q)

    t0 = time.perf_counter()
    trace = None
    if method == "exact":
        control = ControlSignal(t_q, u_ref)
        J = J_ref
        extra = {}
    elif method == "crab":
        cfg = DEConfig(ND=modes, seed=seed, **(de or {}))
        params["de"] = cfg.to_dict()
        result, control = crab_solve(problem, CrabBasis(modes=modes), cfg, quad_points, steps)
        J = result.best_value
        trace = result
        extra = {"seed": seed, "config": cfg.to_dict(), "coeffs": result.best_coeffs}
    else:
        cfg = DirectConfig(nodes=nodes)
        params["direct"] = asdict(cfg)
        result, control = direct_solve(problem, cfg, quad_points, steps)
        J = result.best_value
        trace = result
        extra = {"nodes": control.grid, "values": control.values, "status": result.status}
    report.timings["solve"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    traj = integrate_states(control, problem, steps)
    u_num = control(t_q)
    x_num = traj.position(t_q)
    report.timings["simulate"] = time.perf_counter() - t0

    columns = {"t": t_q, "u": u_num, "x": x_num, "u_star": u_ref, "x_star": x_ref}
    path = out_dir / "control_state.csv"
    write_columns(path, columns)
    report.outputs.append(path)

    path = out_dir / "trajectory.csv"
    write_columns(path, {"t": traj.grid, "x": traj.x, "p": traj.p})
    report.outputs.append(path)

    if eps > 0:
        u_lim, x_lim = limit_functions(t_q)
        path = out_dir / f"exact_eps{eps:g}.csv"
        write_columns(path, {"t": t_q, "u_star": u_ref, "x_star": x_ref, "u_limit": u_lim, "x_limit": x_lim})
        report.outputs.append(path)

    sup_err = float(np.max(np.abs(u_num - u_ref)))
    objective = {"method": method, "epsilon": eps, "quad_points": quad_points, "J": J, "J_star": J_ref,
                 "sup_err_u": sup_err}
    path = out_dir / "objective.json"
    write_json(path, objective)
    report.outputs.append(path)

    if trace is not None:
        path = out_dir / "trace.csv"
        n = trace.history_values.size
        write_csv(path, ["generation", "best_J", "wall_seconds"],
                  zip(range(1, n + 1), trace.history_values, trace.wall_seconds))
        report.outputs.append(path)
        path = out_dir / "result.json"
        write_json(path, {"method": method, "J": J, "evaluations": trace.evaluations,
                          "rejected": trace.rejected, **extra})
        report.outputs.append(path)

    report.results = {"J": J, "J_star": J_ref, "sup_err_u": sup_err}

    # plots go last so data files are already on disk
    u_series = [(f"{method}", t_q, u_num)]
    x_series = [(f"{method}", t_q, x_num)]
    if method != "exact":
        u_series.append(("exact" if eps > 0 else "limit", t_q, u_ref))
        x_series.append(("exact" if eps > 0 else "limit", t_q, x_ref))
    if 0 < eps <= 0.04:
        u_lim, x_lim = limit_functions(t_q[1:])
        u_series.append(("limit", t_q[1:], u_lim))
        x_series.append(("limit", t_q[1:], x_lim))
    _safe_plot(report, out_dir / "control.svg", u_series, title=f"control, eps={eps:g}", ylabel="u")
    _safe_plot(report, out_dir / "state.svg", x_series, title=f"state, eps={eps:g}", ylabel="x")
    return report.finish(out_dir)


def _run_cell(args) -> dict:
    method, eps, seed, cell_dir, kwargs = args
    t = time.perf_counter()
    row = {"method": method, "eps": eps, "seed": seed if method != "exact" else None}
    try:
        rep = cmd_ocp(method, eps, seed if seed is not None else 0, cell_dir, **kwargs)
        row.update(J=rep.results["J"], J_star=rep.results["J_star"], sup_err_u=rep.results["sup_err_u"],
                   status="ok", error="")
    except Exception as exc:  # recorded per cell; the sweep carries on
        row.update(J=None, J_star=None, sup_err_u=None, status="failed", error=f"{type(exc).__name__}: {exc}")
    row["wall_seconds"] = time.perf_counter() - t
    return row


def worker_count() -> int:
    env = os.environ.get("TIKREG_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InvalidInputError(f"TIKREG_THREADS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def sweep_cells(eps_list, seeds) -> list[tuple[str, float, int | None]]:
    cells = []
    for eps in eps_list:
        if eps > 0:
            cells.append(("exact", eps, None))
        for method in ("crab", "direct"):
            for seed in seeds:
                cells.append((method, eps, seed))
    return cells


def cmd_sweep(eps_list, seeds, out_dir=".", **kwargs) -> RunReport:
    eps_list, seeds = list(eps_list), list(seeds)
    if not eps_list or not seeds:
        raise InvalidInputError("eps and seed lists must be non-empty")
    out_dir = Path(out_dir)
    report = RunReport("sweep", {"eps": eps_list, "seeds": seeds, **kwargs}, versions=_versions())
    jobs = []
    for method, eps, seed in sweep_cells(eps_list, seeds):
        name = f"{method}_eps{eps:g}" + (f"_seed{seed}" if seed is not None else "")
        jobs.append((method, eps, seed, out_dir / name, kwargs))
    t = time.perf_counter()
    workers = min(worker_count(), len(jobs))
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_run_cell, jobs))
    else:
        rows = [_run_cell(job) for job in jobs]
    report.timings["cells"] = time.perf_counter() - t

    header = ["method", "eps", "seed", "J", "J_star", "sup_err_u", "wall_seconds", "status", "error"]
    path = out_dir / "summary.csv"
    write_csv(path, header, ([r[k] for k in header] for r in rows))
    report.outputs.append(path)
    failed = [r for r in rows if r["status"] != "ok"]
    report.results = {"cells": len(rows), "failed": len(failed)}
    for r in failed:
        report.warnings.append(f"{r['method']} eps={r['eps']} seed={r['seed']}: {r['error']}")
    return report.finish(out_dir)

