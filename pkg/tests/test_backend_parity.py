"""The compiled kernels and the numpy fallback must agree to rounding."""

import numpy as np
import pytest

from oscnorm import _backend, _kernels_py

compiled = pytest.importorskip(
    "oscnorm._kernels", reason="compiled kernel extension not built"
)


def test_active_backend_reported():
    assert _backend.backend_name() in ("compiled", "python")


def test_maxplus_merge_parity():
    rng = np.random.default_rng(70)
    for la, lb in [(1, 1), (2, 5), (17, 17), (64, 33)]:
        a = rng.random(la)
        b = rng.random(lb)
        got = compiled.maxplus_merge(a, b)
        want = _kernels_py.maxplus_merge(a, b)
        assert np.allclose(got, want, rtol=0, atol=0)


def _table(side, dim, exponent, mu):
    offs = np.arange(-(side - 1), side, dtype=np.float64)
    r2 = np.zeros((offs.size,) * dim)
    for axis in range(dim):
        shape = [1] * dim
        shape[axis] = offs.size
        r2 = r2 + (offs**2).reshape(shape)
    center = (side - 1,) * dim
    r2[center] = 1.0
    t = r2 ** (exponent / 2.0) * mu
    t[center] = 0.123 * mu  # arbitrary nonzero self weight for the parity test
    return t


@pytest.mark.parametrize("dim,level", [(1, 5), (2, 3)])
@pytest.mark.parametrize("p", [1.0, 2.0, 1.7])
def test_diffpow_parity(dim, level, p):
    rng = np.random.default_rng(71)
    side = 1 << level
    n = side**dim
    vals = rng.standard_normal(n)
    table = _table(side, dim, -1.3, 2.0**-level)
    table[(side - 1,) * dim] = 0.0
    if dim == 1:
        got = compiled.diffpow_weighted_sums_1d(vals, p, table)
    else:
        got = compiled.diffpow_weighted_sums_2d(vals.reshape(side, side), p, table)
    want = _kernels_py.diffpow_weighted_sums(vals, p, side, dim, table)
    assert np.allclose(got, want, rtol=1e-12, atol=1e-13)


@pytest.mark.parametrize("dim,level", [(1, 5), (2, 3)])
def test_weighted_sums_parity(dim, level):
    rng = np.random.default_rng(72)
    side = 1 << level
    n = side**dim
    vals = rng.standard_normal(n)
    table = _table(side, dim, -0.5, 2.0**-level)
    if dim == 1:
        got = compiled.weighted_sums_1d(vals, table)
    else:
        got = compiled.weighted_sums_2d(vals.reshape(side, side), table)
    want = _kernels_py.weighted_sums(vals, side, dim, table)
    assert np.allclose(got, want, rtol=1e-12, atol=1e-13)


def test_dispatch_uses_fallback_for_high_dims():
    # dim 3 has no compiled specialization; the wrapper must fall back
    rng = np.random.default_rng(73)
    side = 2
    vals = rng.standard_normal(8)
    table = _table(side, 3, -0.5, 0.125)
    out = _backend.weighted_sums(vals, side, 3, table)
    want = _kernels_py.weighted_sums(vals, side, 3, table)
    assert np.allclose(out, want, rtol=0, atol=0)
