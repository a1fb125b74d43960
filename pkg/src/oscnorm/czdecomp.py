"""Dyadic Calderon-Zygmund decomposition and its K-functional comparison.

The stopping time runs top-down over the dyadic tree on averages of |f|;
maximal cubes whose average exceeds the height become stopping cubes.  The
good part replaces f by its (signed) cube mean inside each stopping cube,
the bad part is the remainder, supported on the stopping cubes with zero
mean on each.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cubes import DyadicCube, _level_sums, morton_permutation
from .grid import GridFunction
from .rearrangement import kfunctional, rearr

__all__ = ["CzDecomposition", "cz_decompose", "cz_k_compare", "KComparison"]


@dataclass(frozen=True)
class CzDecomposition:
    """f = good + bad split at height lam.

    good is f outside the stopping cubes and the cube mean inside; bad has
    zero mean on every stopping cube and vanishes elsewhere.  When
    lam >= mean|f| the good part is bounded by 2^n lam (the parent of a
    stopping cube was not stopped).
    """

    lam: float
    stopping_cubes: tuple[DyadicCube, ...]
    good: GridFunction
    bad: GridFunction

    @property
    def stopping_measure(self) -> float:
        return math.fsum(c.measure for c in self.stopping_cubes)


def cz_decompose(g: GridFunction, lam: float) -> CzDecomposition:
    """Stopping-time decomposition of f at height lam > 0.

    If lam < mean|f| over the whole cube, the root is the single stopping
    cube.
    """
    if not lam > 0.0:
        raise ValueError("decomposition height must be positive")
    dim, level = g.dim, g.level
    perm = morton_permutation(dim, level)
    cells_m = g.cells[perm]
    abs_sums = _level_sums(np.abs(cells_m), dim, level)
    signed_sums = _level_sums(cells_m, dim, level)

    stopping: list[tuple[int, int]] = []
    fill = np.zeros(cells_m.size)  # signed cube means on covered cells
    covered = np.zeros(cells_m.size, dtype=bool)
    blocked = np.zeros(1, dtype=bool)  # ancestor already stopped, per rank
    for j in range(level + 1):
        cells_per = 1 << (dim * (level - j))
        means_abs = abs_sums[j] / cells_per  # exact power-of-two scaling
        stop_here = (means_abs > lam) & ~blocked
        for k in np.nonzero(stop_here)[0]:
            stopping.append((j, int(k)))
            sl = slice(k * cells_per, (k + 1) * cells_per)
            fill[sl] = signed_sums[j][k] / cells_per
            covered[sl] = True
        if j < level:
            blocked = np.repeat(blocked | stop_here, 1 << dim)

    bad_m = np.where(covered, cells_m - fill, 0.0)
    good_m = np.where(covered, fill, cells_m)
    bad = np.empty_like(bad_m)
    good = np.empty_like(good_m)
    bad[perm] = bad_m
    good[perm] = good_m
    return CzDecomposition(
        lam=lam,
        stopping_cubes=tuple(DyadicCube.from_rank(dim, j, k) for j, k in stopping),
        good=GridFunction(dim, level, good),
        bad=GridFunction(dim, level, bad),
    )


@dataclass(frozen=True)
class KComparison:
    k_exact: float
    k_cz: float
    ratio: float
    lam: float


def cz_k_compare(g: GridFunction, t: float) -> KComparison:
    """Compare the exact K-functional with the CZ split at height f*(t).

    k_cz = ||bad||_1 + t ||good||_inf is one admissible split, hence always
    >= K(t) = int_0^t f*.  The height is max(f*(t), mean|f|) so it stays
    positive away from the degenerate zero tail.
    """
    if not 0.0 < t < 1.0:
        raise ValueError("comparison needs t in (0, 1)")
    sf = rearr(g)
    l1 = sf.l1
    if l1 == 0.0:
        return KComparison(k_exact=0.0, k_cz=0.0, ratio=1.0, lam=0.0)
    lam = max(float(sf.evaluate(t)), l1)
    dec = cz_decompose(g, lam)
    k_cz = math.fsum(np.abs(dec.bad.cells)) * g.cell_measure + t * float(
        np.max(np.abs(dec.good.cells))
    )
    k_exact = kfunctional(sf, t)
    return KComparison(k_exact=k_exact, k_cz=k_cz, ratio=k_cz / k_exact, lam=lam)
