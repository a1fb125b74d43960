import math

import numpy as np
import pytest
from scipy.integrate import dblquad

from oscnorm import (
    FracParams,
    GridFunction,
    RiSpaceSpec,
    build_stats,
    gagliardo_field,
    gagliardo_seminorm,
    gamma_slack,
    kernel_table,
    rearr,
    ri_norm,
    riesz_potential,
    sobolev_witness,
    w_alpha_pY_norm,
    witness_constant,
)


def brute_field(g, fp):
    """Direct double loop over cell centers (independent of the kernel path)."""
    side = g.side_cells
    h = g.cell_side
    mu = g.cell_measure
    idx = np.indices((side,) * g.dim).reshape(g.dim, -1).T
    centers = (idx + 0.5) * h
    vals = g.cells
    out = np.zeros(vals.size)
    for y in range(vals.size):
        acc = 0.0
        for x in range(vals.size):
            if x == y:
                continue
            r = np.linalg.norm(centers[x] - centers[y])
            acc += abs(vals[x] - vals[y]) ** fp.p * r ** (-(g.dim + fp.alpha * fp.p)) * mu
        out[y] = acc ** (1.0 / fp.p)
    return out


def brute_potential(g, alpha):
    side = g.side_cells
    h = g.cell_side
    mu = g.cell_measure
    idx = np.indices((side,) * g.dim).reshape(g.dim, -1).T
    centers = (idx + 0.5) * h
    self_term = kernel_table(g.dim, alpha).self_cell_coeff * h**alpha
    out = np.zeros(g.cells.size)
    for y in range(g.cells.size):
        acc = g.cells[y] * self_term
        for x in range(g.cells.size):
            if x == y:
                continue
            r = np.linalg.norm(centers[x] - centers[y])
            acc += g.cells[x] * r ** (alpha - g.dim) * mu
        out[y] = acc
    return out


def test_field_two_cell_example():
    g = GridFunction(1, 1, [0.0, 1.0])
    fp = FracParams(0.5, 2.0)
    field = gagliardo_field(g, fp)
    assert np.allclose(field.cells, math.sqrt(2.0), rtol=1e-14)
    assert math.isclose(gagliardo_seminorm(g, fp), math.sqrt(2.0), rel_tol=1e-14)


def test_field_of_constant_is_zero():
    g = GridFunction(2, 2, np.full(16, 3.0))
    fp = FracParams(0.5, 2.0)
    assert np.all(gagliardo_field(g, fp).cells == 0.0)
    assert gagliardo_seminorm(g, fp) == 0.0


def test_field_homogeneity():
    rng = np.random.default_rng(40)
    cells = rng.standard_normal(16)
    fp = FracParams(0.25, 1.5)
    f1 = gagliardo_field(GridFunction(1, 4, cells), fp)
    f3 = gagliardo_field(GridFunction(1, 4, 3.0 * cells), fp)
    assert np.allclose(f3.cells, 3.0 * f1.cells, rtol=1e-12)


@pytest.mark.parametrize(
    "dim,level,alpha,p",
    [(1, 3, 0.5, 2.0), (1, 4, 0.25, 1.0), (2, 2, 0.5, 2.0), (2, 2, 0.75, 1.5)],
)
def test_field_matches_brute_force(dim, level, alpha, p):
    rng = np.random.default_rng(41)
    g = GridFunction(dim, level, rng.standard_normal(1 << (dim * level)))
    fp = FracParams(alpha, p)
    got = gagliardo_field(g, fp).cells
    want = brute_field(g, fp)
    assert np.allclose(got, want, rtol=1e-11, atol=1e-13)


@pytest.mark.parametrize("dim,level,alpha", [(1, 4, 0.5), (2, 2, 0.5), (2, 2, 0.25)])
def test_potential_matches_brute_force(dim, level, alpha):
    rng = np.random.default_rng(42)
    g = GridFunction(dim, level, rng.standard_normal(1 << (dim * level)))
    got = riesz_potential(g, alpha).cells
    want = brute_potential(g, alpha)
    assert np.allclose(got, want, rtol=1e-11, atol=1e-13)


def test_seminorm_is_lp_of_field():
    rng = np.random.default_rng(43)
    g = GridFunction(1, 5, rng.standard_normal(32))
    fp = FracParams(0.5, 2.0)
    lp = ri_norm(rearr(gagliardo_field(g, fp)), RiSpaceSpec.lebesgue(fp.p))
    assert math.isclose(gagliardo_seminorm(g, fp), lp, rel_tol=1e-12)
    assert math.isclose(
        w_alpha_pY_norm(g, fp, RiSpaceSpec.lebesgue(fp.p)),
        gagliardo_seminorm(g, fp),
        rel_tol=1e-12,
    )


def test_self_cell_coefficient_1d_closed_form():
    for alpha in (0.25, 0.5, 0.9):
        got = kernel_table(1, alpha).self_cell_coeff
        assert math.isclose(got, 2.0 ** (1.0 - alpha) / alpha, rel_tol=1e-15)
    assert math.isclose(
        kernel_table(1, 0.5).self_cell_coeff, 2.8284271247461903, rel_tol=1e-12
    )


def test_self_cell_coefficient_2d_vs_dblquad():
    alpha = 0.5
    got = kernel_table(2, alpha).self_cell_coeff
    # oracle: quadrant of the centered unit cell, split at the singular corner
    val, _ = dblquad(
        lambda y, x: (x * x + y * y) ** ((alpha - 2.0) / 2.0),
        0.0,
        0.5,
        0.0,
        0.5,
        epsabs=1e-11,
        epsrel=1e-11,
    )
    assert math.isclose(got, 4.0 * val, rel_tol=1e-7)


def test_potential_linearity_and_positivity():
    rng = np.random.default_rng(44)
    zero = GridFunction(1, 3, np.zeros(8))
    assert np.all(riesz_potential(zero, 0.5).cells == 0.0)
    g = GridFunction(1, 3, np.abs(rng.standard_normal(8)))
    assert np.all(riesz_potential(g, 0.5).cells >= 0.0)
    a = GridFunction(1, 3, rng.standard_normal(8))
    b = GridFunction(1, 3, rng.standard_normal(8))
    combo = GridFunction(1, 3, a.cells + 2.0 * b.cells)
    assert np.allclose(
        riesz_potential(combo, 0.5).cells,
        riesz_potential(a, 0.5).cells + 2.0 * riesz_potential(b, 0.5).cells,
        rtol=1e-11,
        atol=1e-12,
    )


def test_potential_self_adjoint():
    rng = np.random.default_rng(45)
    for dim, level in [(1, 5), (2, 3)]:
        n = 1 << (dim * level)
        g = rng.standard_normal(n)
        h = rng.standard_normal(n)
        ga = GridFunction(dim, level, g)
        ha = GridFunction(dim, level, h)
        lhs = float(np.dot(g, riesz_potential(ha, 0.5).cells))
        rhs = float(np.dot(h, riesz_potential(ga, 0.5).cells))
        assert math.isclose(lhs, rhs, rel_tol=1e-10, abs_tol=1e-10)


def test_witness_two_cell_composition():
    g = GridFunction(1, 1, [0.0, 1.0])
    fp = FracParams(0.5, 2.0)
    assert witness_constant(1, fp) == 1.0
    field = gagliardo_field(g, fp)
    assert np.allclose(
        sobolev_witness(g, fp).cells, riesz_potential(field, fp.alpha).cells
    )


def test_witness_constant_dimension_two():
    fp = FracParams(0.5, 2.0)
    want = 2.0 ** ((2 + 1.0) / 4.0) * 2.0 ** ((2 - 0.5) / 2.0)
    assert math.isclose(witness_constant(2, fp), want, rel_tol=1e-15)


def test_witness_membership_on_random_functions():
    rng = np.random.default_rng(46)
    cases = [(1, 5, 0.5, 2.0), (1, 6, 0.5, 1.5), (2, 3, 0.5, 2.0), (2, 3, 0.25, 2.0)]
    for dim, level, alpha, p in cases:
        g = GridFunction(dim, level, rng.standard_normal(1 << (dim * level)))
        tree = build_stats(g)
        w = sobolev_witness(g, FracParams(alpha, p))
        assert gamma_slack(tree, w) <= 1e-9


def test_constant_witness_is_zero_and_member():
    g = GridFunction(2, 2, np.full(16, 2.5))
    fp = FracParams(0.5, 2.0)
    w = sobolev_witness(g, fp)
    assert np.all(w.cells == 0.0)
    assert gamma_slack(build_stats(g), w) == 0.0


def test_frac_params_validation():
    with pytest.raises(ValueError):
        FracParams(0.0, 2.0)
    with pytest.raises(ValueError):
        FracParams(0.5, 0.5)
    fp = FracParams(0.5, 1.5)
    q = fp.conjugate_q(1)
    assert math.isclose(1.0 / q, 1.0 / 1.5 - 0.5, rel_tol=1e-15)
    assert math.isinf(FracParams(0.5, 2.0).conjugate_q(1))
    with pytest.raises(ValueError):
        FracParams(0.9, 2.0).conjugate_q(1)


@pytest.mark.parametrize("dim,level", [(1, 6), (2, 3)])
def test_fft_path_matches_direct_potential(dim, level):
    rng = np.random.default_rng(47)
    g = GridFunction(dim, level, rng.standard_normal(1 << (dim * level)))
    for alpha in (0.25, 0.5, 0.75):
        direct = riesz_potential(g, alpha).cells
        fast = riesz_potential(g, alpha, method="fft").cells
        assert np.allclose(fast, direct, rtol=1e-8, atol=1e-10)


@pytest.mark.parametrize("dim,level", [(1, 6), (2, 3)])
def test_fft_path_matches_direct_field(dim, level):
    rng = np.random.default_rng(48)
    g = GridFunction(dim, level, rng.standard_normal(1 << (dim * level)))
    fp = FracParams(0.5, 2.0)
    direct = gagliardo_field(g, fp).cells
    fast = gagliardo_field(g, fp, method="fft").cells
    assert np.allclose(fast, direct, rtol=1e-8, atol=1e-10)
    assert math.isclose(
        gagliardo_seminorm(g, fp, method="fft"),
        gagliardo_seminorm(g, fp),
        rel_tol=1e-8,
    )


def test_fft_path_guards():
    g = GridFunction(1, 3, np.arange(8.0))
    with pytest.raises(ValueError, match="p = 2"):
        gagliardo_field(g, FracParams(0.5, 1.5), method="fft")
    with pytest.raises(ValueError, match="method"):
        riesz_potential(g, 0.5, method="warp")
    const = GridFunction(1, 3, np.full(8, 2.0))
    assert np.all(gagliardo_field(const, FracParams(0.5, 2.0), "fft").cells == 0.0)


def test_lorentz_field_norm_reported():
    g = GridFunction(1, 4, np.arange(16.0))
    fp = FracParams(0.5, 2.0)
    lor = w_alpha_pY_norm(g, fp, RiSpaceSpec.lorentz(2.0, 2.0))
    leb = w_alpha_pY_norm(g, fp, RiSpaceSpec.lebesgue(2.0))
    assert math.isfinite(lor) and lor > 0.0
    assert math.isfinite(leb) and leb > 0.0
