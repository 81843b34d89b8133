"""Backend selection for the hot kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise, or
when ``TIKREG_PURE_PYTHON`` is set to a non-empty value other than ``0``,
the numpy implementation in ``_pykernels`` is used.
"""

import os

from . import _pykernels

_force_python = os.environ.get("TIKREG_PURE_PYTHON", "") not in ("", "0")

if _force_python:
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:  # extension not built
        _impl = _pykernels
        BACKEND = "python"

spline_eval = _impl.spline_eval
integrate = _impl.integrate
objective = _impl.objective
jacobi_eigh = _impl.jacobi_eigh

__all__ = ["BACKEND", "spline_eval", "integrate", "objective", "jacobi_eigh"]
