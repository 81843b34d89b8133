"""Compare the compiled kernels with the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N] [--json PATH]

Each row reports the best-of-N wall time per call for both backends and the
largest relative difference between their outputs.
"""

from __future__ import annotations

import argparse
import json
import math
import timeit

import numpy as np

from tikreg import _pykernels

try:
    from tikreg import _ckernels
except ImportError:
    _ckernels = None


def cases(rng):
    T = math.pi
    # one DE generation of CRAB controls on the default quadrature grid
    U = np.ascontiguousarray(rng.normal(size=(120, 12)) @ np.sin(np.outer(np.arange(1, 13), np.linspace(0, T, 1000))))
    # direct-method gradient batch: 13 probes of a 15-node control
    Z = np.ascontiguousarray(rng.normal(size=(13, 15)))
    Z[:, 0] = Z[:, -1] = 0.0
    y = np.ascontiguousarray(rng.normal(size=1000))
    ts = rng.uniform(0, T, 4000)
    M = rng.normal(size=(40, 40))
    S = np.ascontiguousarray(M + M.T)
    return {
        "objective, 120 x 1000 samples": ("objective", (U, 0.0, T, 0.04, 2000, 1000)),
        "objective, 13 x 15 nodes": ("objective", (Z, 0.0, T, 0.04, 2000, 1000)),
        "integrate, 120 x 1000 samples": ("integrate", (U, 0.0, T, 2000)),
        "spline_eval, 1000 knots x 4000": ("spline_eval", (y, 0.0, T, ts)),
        "jacobi_eigh, 40 x 40": ("jacobi_eigh", (S, 1e-14, 50)),
    }


def _first_array(out):
    return np.asarray(out[0] if isinstance(out, tuple) else out, dtype=float)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--json", default=None, help="also write results to this file")
    args = ap.parse_args(argv)

    rows = []
    for name, (fn, fargs) in cases(np.random.default_rng(0)).items():
        row = {"case": name}
        outs = {}
        for label, mod in (("python", _pykernels), ("cython", _ckernels)):
            if mod is None:
                continue
            f = getattr(mod, fn)
            outs[label] = f(*fargs)
            row[label] = min(timeit.repeat(lambda: f(*fargs), number=1, repeat=args.repeat))
        if len(outs) == 2 and fn != "jacobi_eigh":
            a, b = _first_array(outs["python"]), _first_array(outs["cython"])
            row["max_rel_diff"] = float(np.max(np.abs(a - b)) / max(np.max(np.abs(a)), 1e-300))
        elif len(outs) == 2:
            a, b = np.sort(outs["python"][0]), np.sort(outs["cython"][0])
            row["max_rel_diff"] = float(np.max(np.abs(a - b)) / np.max(np.abs(a)))
        rows.append(row)

    print(f"{'case':34s} {'python':>11s} {'cython':>11s} {'speedup':>8s} {'rel diff':>9s}")
    for r in rows:
        cy = r.get("cython")
        speed = f"{r['python'] / cy:7.1f}x" if cy else "      -"
        cy_s = f"{cy * 1e3:8.2f} ms" if cy else "          -"
        diff = f"{r['max_rel_diff']:9.1e}" if "max_rel_diff" in r else "        -"
        print(f"{r['case']:34s} {r['python'] * 1e3:8.2f} ms {cy_s} {speed} {diff}")
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(rows, fh, indent=2)


if __name__ == "__main__":
    main()
