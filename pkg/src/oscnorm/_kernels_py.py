"""Pure numpy implementations of the hot kernels.

These back the package whenever the compiled extension is unavailable (or
OSCNORM_BACKEND=python).  Semantics must match ``_kernels.pyx`` to within
summation rounding; the parity test suite checks both against each other.
"""

from __future__ import annotations

import numpy as np

BACKEND = "python"

# target number of temporary matrix elements per chunk
_CHUNK_ELEMS = 1 << 22


def maxplus_merge(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Max-plus convolution: out[k] = max_{i+j=k} a[i] + b[j]."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size > b.size:
        a, b = b, a
    out = np.full(a.size + b.size - 1, -np.inf)
    for i in range(a.size):
        np.maximum(out[i : i + b.size], a[i] + b, out=out[i : i + b.size])
    return out


def _offset_codes(side: int, dim: int):
    """Per-cell base codes into the flattened (2*side-1)**dim offset table.

    The table index of the pair (x, y) is base[x] - base[y] + center.
    """
    n = side**dim
    idx = np.arange(n, dtype=np.int64)
    width = 2 * side - 1
    base = np.zeros(n, dtype=np.int64)
    stride = 1
    for _ in range(dim):
        base += (idx % side) * stride
        idx //= side
        stride *= width
    center = (side - 1) * (width**dim - 1) // (width - 1) if width > 1 else 0
    return base, center


def diffpow_weighted_sums(
    values: np.ndarray, p: float, side: int, dim: int, table: np.ndarray
) -> np.ndarray:
    """out[y] = sum_x |values[x] - values[y]|**p * table[offset(x, y)].

    ``table`` is the flattened (2*side-1)**dim offset-indexed kernel; its
    center entry multiplies the (vanishing) self term.
    """
    values = np.asarray(values, dtype=np.float64)
    flat = np.ascontiguousarray(table, dtype=np.float64).ravel()
    base, center = _offset_codes(side, dim)
    n = values.size
    out = np.empty(n)
    rows = max(1, _CHUNK_ELEMS // n)
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        codes = base[None, :] - base[start:stop, None] + center
        w = flat[codes]
        d = np.abs(values[None, :] - values[start:stop, None])
        if p == 2.0:
            d *= d
        elif p != 1.0:
            d **= p
        out[start:stop] = (d * w).sum(axis=1)
    return out


def weighted_sums(
    values: np.ndarray, side: int, dim: int, table: np.ndarray
) -> np.ndarray:
    """out[y] = sum_x values[x] * table[offset(x, y)] (self term included)."""
    values = np.asarray(values, dtype=np.float64)
    flat = np.ascontiguousarray(table, dtype=np.float64).ravel()
    base, center = _offset_codes(side, dim)
    n = values.size
    out = np.empty(n)
    rows = max(1, _CHUNK_ELEMS // n)
    for start in range(0, n, rows):
        stop = min(n, start + rows)
        codes = base[None, :] - base[start:stop, None] + center
        out[start:stop] = flat[codes] @ values
    return out
