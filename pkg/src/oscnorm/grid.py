"""Cell-averaged real functions on dyadic grids over the unit cube (0,1)^n.

A grid function at refinement level L stores the average of f over each of
the 2**(n*L) congruent cells, flat in row-major order.  All integrals over
grid-aligned dyadic cubes are then exact sums, which is what every norm in
this package is built on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO

import numpy as np

__all__ = [
    "GridFunction",
    "GeneratorSpec",
    "generate",
    "mean",
    "subtract_mean",
    "integral",
    "refine",
    "load",
    "store",
]


@dataclass(frozen=True)
class GridFunction:
    """Cell averages of a real function on the dyadic grid of (0,1)^dim.

    ``cells`` has length ``2**(dim*level)``, row-major over the axes, and
    must be finite everywhere.  Instances are immutable (the cell array is
    marked read-only) and safe to share across threads.
    """

    dim: int
    level: int
    cells: np.ndarray

    def __post_init__(self):
        if self.dim < 1:
            raise ValueError(f"dim must be >= 1, got {self.dim}")
        if self.level < 0:
            raise ValueError(f"level must be >= 0, got {self.level}")
        cells = np.array(self.cells, dtype=np.float64, copy=True).ravel()
        if cells.size != self.num_cells:
            raise ValueError(
                f"cell count mismatch: expected {self.num_cells} "
                f"(dim={self.dim}, level={self.level}), got {cells.size}"
            )
        if not np.all(np.isfinite(cells)):
            raise ValueError("non-finite cell value")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def num_cells(self) -> int:
        return 1 << (self.dim * self.level)

    @property
    def side_cells(self) -> int:
        """Cells per axis, 2**level."""
        return 1 << self.level

    @property
    def cell_measure(self) -> float:
        return 2.0 ** (-self.dim * self.level)

    @property
    def cell_side(self) -> float:
        return 2.0 ** (-self.level)

    def reshaped(self) -> np.ndarray:
        """Read-only view with shape (2**level,) * dim."""
        return self.cells.reshape((self.side_cells,) * self.dim)

    def same_grid(self, other: "GridFunction") -> bool:
        return self.dim == other.dim and self.level == other.level

    def with_cells(self, cells: np.ndarray) -> "GridFunction":
        return GridFunction(self.dim, self.level, cells)


def mean(g: GridFunction) -> float:
    """Average of f over the unit cube, i.e. f_{Q_0}.

    All cells have equal measure, so this is the exactly-rounded mean of the
    cell values (fsum, then an exact power-of-two scaling).
    """
    return math.fsum(g.cells) / g.num_cells


def integral(g: GridFunction) -> float:
    """Total integral of f over the unit cube; equals mean(g) exactly."""
    return math.fsum(g.cells) * g.cell_measure


def subtract_mean(g: GridFunction) -> GridFunction:
    """g - f_{Q_0}; the result has mean 0 up to one rounding of the mean."""
    return g.with_cells(g.cells - mean(g))


def refine(g: GridFunction, extra_levels: int = 1) -> GridFunction:
    """Represent g on a finer grid by splitting each cell into equal copies.

    Cell averages are unchanged, so every dyadic-cube statistic of the
    refinement agrees with the original.
    """
    if extra_levels < 0:
        raise ValueError("extra_levels must be >= 0")
    arr = g.reshaped()
    for axis in range(g.dim):
        arr = np.repeat(arr, 1 << extra_levels, axis=axis)
    return GridFunction(g.dim, g.level + extra_levels, arr.ravel())


# ---------------------------------------------------------------------------
# Generators
# ---------------------------------------------------------------------------

_KINDS = ("constant", "indicator", "step", "power", "logsing", "checkerboard", "random")


@dataclass(frozen=True)
class GeneratorSpec:
    """Parametrized analytic test functions.

    kind:
      constant      value ``constant`` everywhere
      indicator     1 on the box given by ``bounds`` (one (a, b) per axis)
      step          ``low`` below ``threshold`` on axis ``axis``, ``high`` above
      power         |x - center|**(-beta), beta < dim (integrable singularity)
      logsing       log(1 / |x - center|)
      checkerboard  parity pattern on the level-``period`` dyadic grid
      random        iid cells from ``distribution`` seeded by ``seed``

    Singular kinds (power, logsing) are cell-averaged by midpoint subsampling
    with ``order`` points per axis; all other kinds are averaged exactly.
    """

    kind: str
    constant: float = 0.0
    bounds: tuple[tuple[float, float], ...] | None = None
    threshold: float = 0.5
    low: float = 0.0
    high: float = 1.0
    axis: int = 0
    center: tuple[float, ...] = (0.0,)
    beta: float = 0.5
    order: int = 16
    period: int = 1
    seed: int = 0
    distribution: str = "normal"

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValueError(f"unknown generator kind {self.kind!r}")


def generate(spec: GeneratorSpec, dim: int, level: int) -> GridFunction:
    """Materialize a generator spec as a grid function.

    Deterministic: identical (spec, dim, level) always yields identical cells.
    """
    if dim < 1 or level < 0:
        raise ValueError("need dim >= 1 and level >= 0")
    side = 1 << level
    n_cells = side**dim
    h = 2.0**-level

    if spec.kind == "constant":
        cells = np.full(n_cells, float(spec.constant))
    elif spec.kind == "indicator":
        bounds = spec.bounds
        if bounds is None or len(bounds) != dim:
            raise ValueError("indicator needs one (a, b) bound pair per axis")
        cells = _box_overlap_fractions(bounds, dim, level).ravel()
    elif spec.kind == "step":
        if not 0 <= spec.axis < dim:
            raise ValueError(f"step axis {spec.axis} out of range for dim {dim}")
        edges = np.arange(side + 1) * h
        above = np.clip(edges[1:] - np.maximum(edges[:-1], spec.threshold), 0.0, h) / h
        axis_avg = spec.low + (spec.high - spec.low) * above
        shape = [1] * dim
        shape[spec.axis] = side
        cells = np.broadcast_to(axis_avg.reshape(shape), (side,) * dim).ravel()
    elif spec.kind == "checkerboard":
        if spec.period < 1:
            raise ValueError("checkerboard period must be >= 1")
        if spec.period > level:
            cells = np.full(n_cells, 0.5)
        else:
            shift = level - spec.period
            axes = np.indices((side,) * dim) >> shift
            cells = (axes.sum(axis=0) & 1).astype(np.float64).ravel()
    elif spec.kind in ("power", "logsing"):
        cells = _subsampled_radial(spec, dim, level)
    elif spec.kind == "random":
        rng = np.random.default_rng(spec.seed)
        if spec.distribution == "normal":
            cells = rng.standard_normal(n_cells)
        elif spec.distribution == "uniform":
            cells = rng.random(n_cells)
        else:
            raise ValueError(f"unknown random distribution {spec.distribution!r}")
    else:  # pragma: no cover - guarded by GeneratorSpec.__post_init__
        raise ValueError(f"unknown generator kind {spec.kind!r}")

    return GridFunction(dim, level, cells)


def _box_overlap_fractions(bounds, dim, level) -> np.ndarray:
    side = 1 << level
    h = 2.0**-level
    per_axis = []
    for a, b in bounds:
        if not b > a:
            raise ValueError(f"degenerate indicator bound ({a}, {b})")
        lo = np.arange(side) * h
        hi = lo + h
        overlap = np.clip(np.minimum(hi, b) - np.maximum(lo, a), 0.0, h) / h
        per_axis.append(overlap)
    out = per_axis[0]
    for frac in per_axis[1:]:
        out = np.multiply.outer(out, frac)
    return out


def _subsampled_radial(spec: GeneratorSpec, dim: int, level: int) -> np.ndarray:
    m = spec.order
    if m < 1:
        raise ValueError("subsample order must be >= 1")
    if spec.kind == "power" and not spec.beta < dim:
        raise ValueError(
            f"power exponent beta={spec.beta} must be < dim={dim} for integrability"
        )
    center = np.asarray(spec.center, dtype=np.float64)
    if center.shape != (dim,):
        raise ValueError(f"center must have {dim} coordinates")
    side = 1 << level
    fine = side * m
    coords = (np.arange(fine) + 0.5) / fine

    # Accumulate r^2 over the fine tensor grid one axis at a time, then
    # average each m**dim block of samples back down to its cell.
    r2 = np.zeros((fine,) * dim)
    for axis in range(dim):
        d = coords - center[axis]
        shape = [1] * dim
        shape[axis] = fine
        r2 = r2 + (d * d).reshape(shape)
    r = np.sqrt(r2)
    if np.any(r == 0.0):
        raise ValueError("singularity center coincides with a subsample point")
    if spec.kind == "power":
        vals = r ** (-spec.beta)
    else:
        vals = -np.log(r)
    block_shape = ()
    for _ in range(dim):
        block_shape += (side, m)
    vals = vals.reshape(block_shape)
    mean_axes = tuple(range(1, 2 * dim, 2))
    return vals.mean(axis=mean_axes).ravel()


# ---------------------------------------------------------------------------
# CSV persistence
# ---------------------------------------------------------------------------


def store(g: GridFunction) -> str:
    """Render as CSV: one header line, then rows of the last axis.

    Values use 17 significant digits, which round-trips binary64 exactly.
    """
    width = g.side_cells
    rows = g.cells.reshape(-1, width)
    lines = [f"dim={g.dim},level={g.level}"]
    for row in rows:
        lines.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join(lines) + "\n"


def load(source: str | IO[str]) -> GridFunction:
    """Parse the CSV format written by :func:`store`.

    Accepts any whitespace/newline layout of the body values; validates the
    header, the cell count and finiteness.
    """
    text = source if isinstance(source, str) else source.read()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty input")
    header = lines[0]
    fields = {}
    for part in header.split(","):
        if "=" not in part:
            raise ValueError(f"malformed header {header!r}")
        key, _, val = part.partition("=")
        fields[key.strip()] = val.strip()
    try:
        dim = int(fields["dim"])
        level = int(fields["level"])
    except (KeyError, ValueError) as exc:
        raise ValueError(f"malformed header {header!r}") from exc
    body = ",".join(lines[1:])
    tokens = [tok for tok in body.replace(",", " ").split() if tok]
    try:
        values = np.array([float(tok) for tok in tokens], dtype=np.float64)
    except ValueError as exc:
        raise ValueError(f"malformed cell value: {exc}") from exc
    expected = 1 << (dim * level)
    if values.size != expected:
        raise ValueError(
            f"cell count mismatch: expected {expected}, got {values.size}"
        )
    return GridFunction(dim, level, values)
