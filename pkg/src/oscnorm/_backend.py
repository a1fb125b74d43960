"""Kernel backend selection.

The compiled Cython extension is preferred when importable; the numpy
fallback covers everything else.  OSCNORM_BACKEND=python|compiled forces a
choice (forcing "compiled" raises if the extension is missing).

The compiled kernels specialize dims 1 and 2 (the dimensions the test corpus
exercises); higher dimensions always go through the numpy path.
"""

from __future__ import annotations

import os

import numpy as np

from . import _kernels_py

_requested = os.environ.get("OSCNORM_BACKEND", "").strip().lower()

_compiled = None
if _requested in ("", "auto", "compiled"):
    try:
        from . import _kernels as _compiled  # type: ignore[no-redef]
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "OSCNORM_BACKEND=compiled but the oscnorm._kernels extension "
                "is not built; reinstall without OSCNORM_NO_EXT"
            )
elif _requested != "python":
    raise ValueError(f"unknown OSCNORM_BACKEND value {_requested!r}")

HAVE_COMPILED = _compiled is not None


def backend_name() -> str:
    """'compiled' when the Cython kernels are active, else 'python'."""
    return "compiled" if HAVE_COMPILED else "python"


def maxplus_merge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if _compiled is not None:
        return _compiled.maxplus_merge(
            np.ascontiguousarray(a, dtype=np.float64),
            np.ascontiguousarray(b, dtype=np.float64),
        )
    return _kernels_py.maxplus_merge(a, b)


def diffpow_weighted_sums(
    values: np.ndarray, p: float, side: int, dim: int, table: np.ndarray
) -> np.ndarray:
    values = np.ascontiguousarray(values, dtype=np.float64)
    table = np.ascontiguousarray(table, dtype=np.float64)
    if _compiled is not None and dim == 1:
        return _compiled.diffpow_weighted_sums_1d(values, float(p), table.ravel())
    if _compiled is not None and dim == 2:
        return _compiled.diffpow_weighted_sums_2d(
            values.reshape(side, side), float(p), table.reshape(2 * side - 1, -1)
        )
    return _kernels_py.diffpow_weighted_sums(values, p, side, dim, table)


def weighted_sums(
    values: np.ndarray, side: int, dim: int, table: np.ndarray
) -> np.ndarray:
    values = np.ascontiguousarray(values, dtype=np.float64)
    table = np.ascontiguousarray(table, dtype=np.float64)
    if _compiled is not None and dim == 1:
        return _compiled.weighted_sums_1d(values, table.ravel())
    if _compiled is not None and dim == 2:
        return _compiled.weighted_sums_2d(
            values.reshape(side, side), table.reshape(2 * side - 1, -1)
        )
    return _kernels_py.weighted_sums(values, side, dim, table)
