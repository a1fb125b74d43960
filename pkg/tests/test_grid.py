import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oscnorm import (
    GeneratorSpec,
    GridFunction,
    generate,
    integral,
    load,
    mean,
    refine,
    store,
    subtract_mean,
)


def test_constant_generator():
    g = generate(GeneratorSpec("constant", constant=5.0), 1, 2)
    assert g.cells.tolist() == [5, 5, 5, 5]


def test_indicator_exact():
    g = generate(GeneratorSpec("indicator", bounds=((0.5, 1.0),)), 1, 1)
    assert g.cells.tolist() == [0.0, 1.0]


def test_indicator_partial_overlap_exact():
    # box [1/4, 5/8) on a level-1 grid: fractions 1/2 and 1/4
    g = generate(GeneratorSpec("indicator", bounds=((0.25, 0.625),)), 1, 1)
    assert g.cells.tolist() == [0.5, 0.25]


def test_power_first_cell_closed_form():
    # oracle: int_0^{1/4} x^(-1/2) dx = 2 sqrt(1/4) = 1, so the exact cell
    # average is 4; midpoint subsampling underestimates a convex integrand
    g16 = generate(GeneratorSpec("power", center=(0.0,), beta=0.5, order=16), 1, 2)
    assert g16.cells[0] < 4.0
    assert abs(g16.cells[0] - 4.0) / 4.0 < 0.10
    g256 = generate(GeneratorSpec("power", center=(0.0,), beta=0.5, order=256), 1, 2)
    assert abs(g256.cells[0] - 4.0) < abs(g16.cells[0] - 4.0)
    # away from the singularity the subsampled average is accurate to the
    # midpoint-rule error term: int_{1/2}^{3/4} x^(-1/2) dx = 2(sqrt3 - sqrt2)/2
    exact = (math.sqrt(3.0) - math.sqrt(2.0)) * 4.0
    assert abs(g16.cells[2] - exact) < 1e-4
    assert abs(g256.cells[2] - exact) < 5e-7


def test_power_rejects_nonintegrable_exponent():
    with pytest.raises(ValueError, match="beta"):
        generate(GeneratorSpec("power", center=(0.0,), beta=1.0), 1, 2)


def test_random_unknown_distribution_rejected():
    with pytest.raises(ValueError, match="distribution"):
        generate(GeneratorSpec("random", seed=0, distribution="cauchy"), 1, 2)


def test_generate_deterministic():
    spec = GeneratorSpec("random", seed=42, distribution="normal")
    a = generate(spec, 2, 3)
    b = generate(spec, 2, 3)
    assert np.array_equal(a.cells, b.cells)


def test_checkerboard_finest_level():
    g = generate(GeneratorSpec("checkerboard", period=2), 1, 2)
    assert g.cells.tolist() == [0, 1, 0, 1]
    # coarser pattern than the grid: exact halves
    g2 = generate(GeneratorSpec("checkerboard", period=3), 1, 2)
    assert g2.cells.tolist() == [0.5] * 4


def test_mean_and_subtract_mean_examples():
    g = GridFunction(1, 2, [0, 0, 1, 1])
    assert mean(g) == 0.5
    gc = subtract_mean(generate(GeneratorSpec("constant", constant=7.0), 1, 2))
    assert np.all(gc.cells == 0.0)
    g2 = GridFunction(1, 2, [3, 1, 2, 0])
    assert mean(g2) == 1.5
    assert subtract_mean(g2).cells.tolist() == [1.5, -0.5, 0.5, -1.5]


def test_integral_equals_mean_exactly():
    rng = np.random.default_rng(1)
    for level in (3, 6, 11):
        g = GridFunction(1, level, rng.standard_normal(1 << level))
        assert integral(g) == mean(g)  # both scale the same fsum by 2^-nL


def test_subtract_mean_idempotent_to_one_rounding():
    rng = np.random.default_rng(2)
    g = GridFunction(2, 3, 100.0 * rng.standard_normal(64))
    once = subtract_mean(g)
    twice = subtract_mean(once)
    assert abs(mean(once)) <= 8 * np.finfo(float).eps * np.max(np.abs(g.cells))
    assert np.allclose(once.cells, twice.cells, rtol=0, atol=1e-12)


def test_cell_count_invariant():
    with pytest.raises(ValueError, match="cell count mismatch"):
        GridFunction(1, 2, [1.0, 2.0, 3.0])
    with pytest.raises(ValueError, match="non-finite"):
        GridFunction(1, 1, [1.0, math.nan])


def test_csv_round_trip_values_bit_exact():
    rng = np.random.default_rng(3)
    g = GridFunction(2, 2, rng.standard_normal(16) * 1e3)
    g2 = load(store(g))
    assert g2.dim == g.dim and g2.level == g.level
    assert np.array_equal(g.cells, g2.cells)


def test_csv_parse_and_idempotent_store():
    g = load("dim=1,level=1\n0,1")
    assert g.dim == 1 and g.level == 1
    assert g.cells.tolist() == [0.0, 1.0]
    text = store(g)
    assert text.replace("\n", ",").split(",")[0:3] == ["dim=1", "level=1", "0"]
    assert store(load(text)) == text


def test_csv_errors():
    with pytest.raises(ValueError, match="cell count mismatch"):
        load("dim=1,level=2\n0,1,2")
    with pytest.raises(ValueError, match="header"):
        load("dimension=1\n0")
    with pytest.raises(ValueError, match="non-finite"):
        load("dim=1,level=0\ninf")


def test_refine_preserves_cell_averages():
    rng = np.random.default_rng(4)
    g = GridFunction(2, 2, rng.standard_normal(16))
    r = refine(g)
    assert r.level == g.level + 1
    coarse = r.reshaped()[::2, ::2]
    assert np.array_equal(coarse.ravel(), g.reshaped()[:, :].ravel())


@given(
    st.lists(st.floats(-1e6, 1e6), min_size=8, max_size=8),
    st.integers(0, 2**31),
)
@settings(max_examples=30, deadline=None)
def test_mean_matches_numpy_reference(cells, _seed):
    g = GridFunction(1, 3, cells)
    assert math.isclose(mean(g), float(np.mean(g.cells)), rel_tol=1e-12, abs_tol=1e-9)
