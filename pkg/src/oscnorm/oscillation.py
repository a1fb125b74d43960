"""Partition-supremum oscillation norms as antichain optimization problems.

Every family of subcubes with pairwise disjoint interiors that this package
considers is an antichain of grid-aligned dyadic cubes.  In Morton order the
dyadic tree embeds into a perfect binary tree over the cells (a node of the
binary tree is an actual cube exactly when its depth is a multiple of the
dimension), so all four supremum problems reduce to dynamic programs over
that binary tree:

* jn_norm          max over antichains of sum (|Q|^{1/p-1} osc1)^p
* garo_front       the full (measure, osc2-sum) Pareto set, either exactly
                   per achievable measure (a tree knapsack with max-plus
                   convolutions) or its concave envelope via a Lagrangian
                   sweep
* gamma_slack      max over nonempty antichains of sum (osc2 - int gamma)
* brute force      exhaustive antichain enumeration, the oracle for all of
                   the above on tiny trees

Computed values are exact for the dyadic problem and lower bounds for the
all-cube suprema; every report downstream carries a "dyadic" mode flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import _backend
from .cubes import CubeStatsTree, DyadicCube
from .grid import GridFunction
from .rearrangement import RiSpaceSpec, rearr, ri_norm

__all__ = [
    "FamilySelection",
    "ParetoFront",
    "jn_norm",
    "garo_front",
    "garo_norm",
    "garo_infty_norm",
    "bmo_norm",
    "bbm_norm",
    "gamma_slack",
    "gamma_slack_family",
    "garoX_upper",
    "enumerate_antichains",
    "brute_force_families",
    "validate_antichain",
    "EXACT_BUDGET_LIMIT",
]

# largest cell count for which the exact-budget knapsack is the default
EXACT_BUDGET_LIMIT = 1 << 14


def validate_antichain(cubes: Sequence[DyadicCube]) -> bool:
    """True when no cube of the family contains another."""
    items = sorted(cubes, key=lambda c: c.level)
    for i, a in enumerate(items):
        for b in items[i + 1 :]:
            if a.contains(b):
                return False
    return True


@dataclass(frozen=True)
class FamilySelection:
    """An antichain of dyadic cubes with its totals."""

    cubes: tuple[DyadicCube, ...]
    total_measure: float
    total_osc: float
    objective_value: float

    @classmethod
    def from_cubes(
        cls, tree: CubeStatsTree, cubes: Iterable[tuple[int, int]],
        objective_value: float | None = None,
    ) -> "FamilySelection":
        cubes = list(cubes)
        measure = math.fsum(tree.cube_measure(j) for j, _ in cubes)
        osc = math.fsum(float(tree.osc2[j][k]) for j, k in cubes)
        return cls(
            cubes=tuple(tree.cube(j, k) for j, k in cubes),
            total_measure=measure,
            total_osc=osc,
            objective_value=osc if objective_value is None else objective_value,
        )


@dataclass(eq=False)
class ParetoFront:
    """Optimal (total measure, total osc2) pairs over dyadic antichains.

    Measures and oscillations are strictly increasing; no point dominates
    another.  ``mode`` records whether this is the complete Pareto set
    ("exact_budget") or the certified concave-envelope subset from the
    Lagrangian sweep ("lambda_sweep").  Witness families are reconstructed
    on demand and cached.
    """

    measures: np.ndarray
    oscillations: np.ndarray
    mode: str
    _witness_fn: Callable[[int], FamilySelection] | None = field(
        default=None, repr=False
    )
    _witness_cache: dict = field(default_factory=dict, repr=False)

    def __len__(self) -> int:
        return int(self.measures.size)

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.measures.tolist(), self.oscillations.tolist()))

    def witness(self, i: int) -> FamilySelection:
        if i not in self._witness_cache:
            if self._witness_fn is None:
                raise ValueError("front carries no witness reconstructor")
            self._witness_cache[i] = self._witness_fn(i)
        return self._witness_cache[i]

    def witnesses(self) -> list[FamilySelection]:
        return [self.witness(i) for i in range(len(self))]


# ---------------------------------------------------------------------------
# Binary-tree DP helpers
# ---------------------------------------------------------------------------


def _cube_levels(tree: CubeStatsTree):
    """Binary depths that correspond to actual cube levels."""
    depth = tree.dim * tree.level
    return depth, {d: d // tree.dim for d in range(depth + 1) if d % tree.dim == 0}


def jn_norm(tree: CubeStatsTree, p: float) -> float:
    """Dyadic John-Nirenberg norm.

    Scores (|Q|^{1/p-1} int_Q |f - f_Q|)^p are non-negative, so the optimal
    antichain decomposes over subtrees and one bottom-up pass is exact.
    """
    if not 1.0 < p < math.inf:
        raise ValueError("jn_norm needs p in (1, inf)")
    depth, cube_at = _cube_levels(tree)
    cur = np.zeros(1 << depth)
    # leaves are single cells: zero oscillation, nothing to add
    for d in range(depth - 1, -1, -1):
        cur = cur[0::2] + cur[1::2]
        if d in cube_at:
            j = cube_at[d]
            score = (tree.cube_measure(j) ** (1.0 / p - 1.0) * tree.osc1[j]) ** p
            np.maximum(cur, score, out=cur)
    return float(cur[0] ** (1.0 / p))


# -- exact-budget knapsack ---------------------------------------------------


def _exact_tables(tree: CubeStatsTree) -> list[np.ndarray]:
    """tables[d][k, b] = max total osc2 over antichains in node (d, k) covering
    exactly b cells; node (d, k) spans 2**(depth-d) cells."""
    depth, cube_at = _cube_levels(tree)
    tables: list[np.ndarray] = [np.empty(0)] * (depth + 1)
    leaf = np.zeros(((1 << depth), 2))
    tables[depth] = leaf
    for d in range(depth - 1, -1, -1):
        child = tables[d + 1]
        m = 1 << (depth - d)
        cur = np.empty((1 << d, m + 1))
        for k in range(1 << d):
            cur[k] = _backend.maxplus_merge(child[2 * k], child[2 * k + 1])
        if d in cube_at:
            j = cube_at[d]
            np.maximum(cur[:, m], tree.osc2[j], out=cur[:, m])
        tables[d] = cur
    return tables


def _reconstruct_exact(
    tree: CubeStatsTree, tables: list[np.ndarray], budget: int
) -> list[tuple[int, int]]:
    depth, cube_at = _cube_levels(tree)
    out: list[tuple[int, int]] = []

    def walk(d: int, k: int, b: int) -> None:
        if b == 0:
            return
        m = 1 << (depth - d)
        val = tables[d][k, b]
        if b == m and d in cube_at:
            j = cube_at[d]
            if tree.osc2[j][k] >= val:
                out.append((j, k))
                return
        left = tables[d + 1][2 * k]
        right = tables[d + 1][2 * k + 1]
        half = m >> 1
        idx = np.arange(max(0, b - half), min(half, b) + 1)
        i = int(idx[np.argmax(left[idx] + right[b - idx])])
        walk(d + 1, 2 * k, i)
        walk(d + 1, 2 * k + 1, b - i)

    walk(0, 0, budget)
    return out


def _exact_front(tree: CubeStatsTree) -> ParetoFront:
    tables = _exact_tables(tree)
    root = tables[0][0]
    mu = tree.cell_measure
    budgets: list[int] = []
    best = 0.0
    for b in range(1, root.size):
        if root[b] > best:
            best = root[b]
            budgets.append(b)
    measures = np.array([b * mu for b in budgets])
    oscs = np.array([root[b] for b in budgets])

    def witness(i: int) -> FamilySelection:
        picks = _reconstruct_exact(tree, tables, budgets[i])
        return FamilySelection.from_cubes(tree, picks)

    return ParetoFront(measures, oscs, "exact_budget", witness)


# -- Lagrangian sweep ---------------------------------------------------------


def _sweep_values(tree: CubeStatsTree, lambdas: np.ndarray) -> list[np.ndarray]:
    """vals[d][i, k]: best sum of (osc2 - lambda_i |Q|) over antichains of
    node (d, k), empty allowed (hence always >= 0)."""
    depth, cube_at = _cube_levels(tree)
    vals: list[np.ndarray] = [np.empty(0)] * (depth + 1)
    lam = lambdas[:, None]
    cur = np.maximum(tree.osc2[tree.level][None, :] - lam * tree.cell_measure, 0.0)
    vals[depth] = cur
    for d in range(depth - 1, -1, -1):
        cur = cur[:, 0::2] + cur[:, 1::2]
        if d in cube_at:
            j = cube_at[d]
            gain = tree.osc2[j][None, :] - lam * tree.cube_measure(j)
            cur = np.maximum(cur, gain)
        vals[d] = cur
    return vals


def _sweep_trace(
    tree: CubeStatsTree, vals: list[np.ndarray], li: int, lam: float
) -> list[tuple[int, int]]:
    depth, cube_at = _cube_levels(tree)
    out: list[tuple[int, int]] = []

    def walk(d: int, k: int) -> None:
        v = vals[d][li, k]
        if v <= 0.0:
            return
        if d in cube_at:
            j = cube_at[d]
            if tree.osc2[j][k] - lam * tree.cube_measure(j) >= v:
                out.append((j, k))
                return
        walk(d + 1, 2 * k)
        walk(d + 1, 2 * k + 1)

    walk(0, 0)
    return out


def _sweep_front(tree: CubeStatsTree, lambdas: np.ndarray) -> ParetoFront:
    vals = _sweep_values(tree, lambdas)
    found: dict[float, FamilySelection] = {}
    for li, lam in enumerate(lambdas):
        picks = _sweep_trace(tree, vals, li, float(lam))
        if not picks:
            continue
        fam = FamilySelection.from_cubes(tree, picks)
        cur = found.get(fam.total_measure)
        if cur is None or fam.total_osc > cur.total_osc:
            found[fam.total_measure] = fam
    fams = sorted(found.values(), key=lambda f: f.total_measure)
    measures, oscs, wits = [], [], []
    best = 0.0
    for fam in fams:
        if fam.total_osc > best:
            best = fam.total_osc
            measures.append(fam.total_measure)
            oscs.append(fam.total_osc)
            wits.append(fam)
    front = ParetoFront(np.array(measures), np.array(oscs), "lambda_sweep")
    front._witness_cache = dict(enumerate(wits))
    front._witness_fn = front._witness_cache.__getitem__
    return front


def default_sweep_lambdas(tree: CubeStatsTree, count: int) -> np.ndarray:
    top = garo_infty_norm(tree)
    if top <= 0.0:
        return np.zeros(count)
    return np.concatenate(([0.0], np.geomspace(top * 1e-8, top, count - 1)))


def garo_front(
    tree: CubeStatsTree,
    mode: str = "auto",
    sweep_points: int = 64,
    lambdas: Sequence[float] | None = None,
) -> ParetoFront:
    """Pareto set of (total measure, total osc2) over dyadic antichains.

    mode "exact_budget" runs the tree knapsack indexed by achievable measure
    (every measure is a multiple of the cell measure) and is exact; mode
    "lambda_sweep" solves max(sum osc2 - lambda measure) for a grid of
    lambda values and returns the concave-envelope subset, a certified lower
    bound.  "auto" picks exact_budget up to EXACT_BUDGET_LIMIT cells.
    """
    if mode == "auto":
        mode = (
            "exact_budget"
            if (1 << (tree.dim * tree.level)) <= EXACT_BUDGET_LIMIT
            else "lambda_sweep"
        )
    if mode == "exact_budget":
        return _exact_front(tree)
    if mode != "lambda_sweep":
        raise ValueError(f"unknown garo_front mode {mode!r}")
    if lambdas is None:
        if sweep_points < 2:
            raise ValueError("lambda sweep needs at least 2 points")
        lambdas = default_sweep_lambdas(tree, sweep_points)
    lam = np.asarray(lambdas, dtype=np.float64)
    if lam.size < 2:
        raise ValueError("lambda sweep needs at least 2 points")
    return _sweep_front(tree, lam)


def garo_norm(front: ParetoFront, p: float) -> float:
    """Garsia-Rodemich norm from a Pareto front.

    For p < inf this is max osc / measure^{1/p'}; for p = inf the ratio
    osc/measure, whose optimum over antichains is attained by a single cube.
    Exact when the front is exact; a lower bound in sweep mode.
    """
    if not 1.0 < p:
        raise ValueError("garo_norm needs p in (1, inf]")
    if len(front) == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(front.oscillations / front.measures))
    pprime = p / (p - 1.0)
    return float(np.max(front.oscillations / front.measures ** (1.0 / pprime)))


def garo_infty_norm(tree: CubeStatsTree) -> float:
    """sup over single cubes of osc2(Q)/|Q| (the p = inf case, exact)."""
    return max(
        float(np.max(tree.osc2[j])) / tree.cube_measure(j)
        for j in range(tree.level + 1)
    )


def bmo_norm(tree: CubeStatsTree) -> tuple[float, float]:
    """(classical BMO, pair-oscillation BMO): sup osc1/|Q| and sup osc2/|Q|."""
    osc1_form = max(
        float(np.max(tree.osc1[j])) / tree.cube_measure(j)
        for j in range(tree.level + 1)
    )
    return osc1_form, garo_infty_norm(tree)


def bbm_norm(tree: CubeStatsTree, p: float) -> float:
    """Equal-side-length scaling norm over capped families.

    For each dyadic side 2^-j (j >= 1) take the floor(2^{j(n-1)}) level-j
    cubes with largest osc2, sum, and scale by 2^{j/p'}; the result is the
    max over j.  Q_0 itself has side 1 and is excluded.
    """
    if not 1.0 < p:
        raise ValueError("bbm_norm needs p in (1, inf]")
    inv_pprime = 1.0 if math.isinf(p) else (p - 1.0) / p
    best = 0.0
    for j in range(1, tree.level + 1):
        osc = tree.osc2[j]
        cap = min(osc.size, 1 << (j * (tree.dim - 1)))
        if cap == osc.size:
            total = float(osc.sum())
        else:
            total = float(np.partition(osc, osc.size - cap)[osc.size - cap :].sum())
        best = max(best, 2.0 ** (j * inv_pprime) * total)
    return best


# ---------------------------------------------------------------------------
# Majorant membership (Gamma_f)
# ---------------------------------------------------------------------------


def _slack_values(tree: CubeStatsTree, gints: list[np.ndarray]) -> list[np.ndarray]:
    depth, cube_at = _cube_levels(tree)
    vals: list[np.ndarray] = [np.empty(0)] * (depth + 1)
    cur = np.maximum(tree.osc2[tree.level] - gints[tree.level], 0.0)
    vals[depth] = cur
    for d in range(depth - 1, -1, -1):
        cur = cur[0::2] + cur[1::2]
        if d in cube_at:
            j = cube_at[d]
            cur = np.maximum(cur, tree.osc2[j] - gints[j])
        vals[d] = cur
    return vals


def gamma_slack(tree: CubeStatsTree, gamma: GridFunction) -> float:
    """max over nonempty dyadic antichains of sum(osc2(Q) - int_Q |gamma|).

    gamma is a member of the (dyadic) majorant set iff the slack is <= 0.
    """
    return gamma_slack_family(tree, gamma)[0]


def gamma_slack_family(
    tree: CubeStatsTree, gamma: GridFunction
) -> tuple[float, FamilySelection]:
    """Slack plus a witnessing family attaining it."""
    gints = tree.gamma_integrals(gamma)
    vals = _slack_values(tree, gints)
    root = float(vals[0][0])
    if root > 0.0:
        picks = _slack_trace(tree, gints, vals)
        fam = FamilySelection.from_cubes(tree, picks, objective_value=root)
        return root, fam
    # every antichain is non-positive; the best nonempty one is a single cube
    best = -math.inf
    best_cube = (0, 0)
    for j in range(tree.level + 1):
        diff = tree.osc2[j] - gints[j]
        k = int(np.argmax(diff))
        if diff[k] > best:
            best = float(diff[k])
            best_cube = (j, k)
    fam = FamilySelection.from_cubes(tree, [best_cube], objective_value=best)
    return best, fam


def _slack_trace(
    tree: CubeStatsTree, gints: list[np.ndarray], vals: list[np.ndarray]
) -> list[tuple[int, int]]:
    depth, cube_at = _cube_levels(tree)
    out: list[tuple[int, int]] = []

    def walk(d: int, k: int) -> None:
        v = vals[d][k]
        if v <= 0.0:
            return
        if d in cube_at:
            j = cube_at[d]
            if tree.osc2[j][k] - gints[j][k] >= v:
                out.append((j, k))
                return
        walk(d + 1, 2 * k)
        walk(d + 1, 2 * k + 1)

    walk(0, 0)
    return out


def garoX_upper(
    tree: CubeStatsTree,
    gamma: GridFunction,
    space: RiSpaceSpec,
    slack_tol: float = 1e-9,
) -> float:
    """Upper bound ||gamma||_X on the majorant-form norm, witnessed by gamma.

    Rejects non-members: the slack of gamma must be <= slack_tol.
    """
    slack, fam = gamma_slack_family(tree, gamma)
    if slack > slack_tol:
        raise ValueError(
            f"gamma is not an admissible majorant: slack {slack:.6g} > "
            f"{slack_tol:.1g} (worst family: {len(fam.cubes)} cubes, "
            f"osc {fam.total_osc:.6g})"
        )
    return ri_norm(rearr(gamma), space)


# ---------------------------------------------------------------------------
# Exhaustive oracle
# ---------------------------------------------------------------------------


def enumerate_antichains(tree: CubeStatsTree) -> list[tuple[tuple[int, int], ...]]:
    """All nonempty antichains of the dyadic tree as (level, rank) tuples.

    Only feasible on tiny trees; guarded at 30 cubes.
    """
    if tree.num_cubes > 30:
        raise ValueError(
            f"tree too large for enumeration: {tree.num_cubes} cubes > 30"
        )
    depth, cube_at = _cube_levels(tree)

    def options(d: int, k: int) -> list[tuple[tuple[int, int], ...]]:
        if d == depth:
            return [(), ((cube_at[d], k),)]
        combos = [
            left + right
            for left in options(d + 1, 2 * k)
            for right in options(d + 1, 2 * k + 1)
        ]
        if d in cube_at:
            combos.append(((cube_at[d], k),))
        return combos

    return [fam for fam in options(0, 0) if fam]


def brute_force_families(
    tree: CubeStatsTree,
    objective: Callable[[Sequence[tuple[int, int]]], float],
) -> FamilySelection:
    """argmax of ``objective`` over every nonempty dyadic antichain."""
    best_val = -math.inf
    best_fam: tuple[tuple[int, int], ...] = ()
    for fam in enumerate_antichains(tree):
        val = objective(fam)
        if val > best_val:
            best_val = val
            best_fam = fam
    return FamilySelection.from_cubes(tree, best_fam, objective_value=best_val)
