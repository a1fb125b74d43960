"""Exhaustive-enumeration cross-checks for the antichain dynamic programs.

On trees small enough to enumerate every antichain, the DP answers must
match the brute-force optimum to rounding.  Used by the oracle CLI command
and the acceptance suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cubes import CubeStatsTree, build_stats
from .grid import GridFunction
from .oscillation import enumerate_antichains, gamma_slack, garo_front, jn_norm

__all__ = ["OracleOutcome", "run_oracle", "brute_front_points", "brute_jn", "brute_slack"]


def _rel_err(a: float, b: float) -> float:
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0.0 else abs(a - b) / scale


def brute_jn(tree: CubeStatsTree, p: float) -> float:
    best = 0.0
    for fam in enumerate_antichains(tree):
        total = math.fsum(
            (tree.cube_measure(j) ** (1.0 / p - 1.0) * float(tree.osc1[j][k])) ** p
            for j, k in fam
        )
        best = max(best, total)
    return best ** (1.0 / p)


def brute_front_points(tree: CubeStatsTree) -> list[tuple[float, float]]:
    """Pareto points (measure, max osc2) from exhaustive enumeration."""
    by_budget: dict[int, float] = {}
    cells = 1 << (tree.dim * tree.level)
    for fam in enumerate_antichains(tree):
        budget = sum(cells >> (tree.dim * j) for j, _ in fam)
        osc = math.fsum(float(tree.osc2[j][k]) for j, k in fam)
        if osc > by_budget.get(budget, -1.0):
            by_budget[budget] = osc
    mu = tree.cell_measure
    points = []
    best = 0.0
    for b in sorted(by_budget):
        if by_budget[b] > best:
            best = by_budget[b]
            points.append((b * mu, best))
    return points


def brute_slack(tree: CubeStatsTree, gamma: GridFunction) -> float:
    gints = tree.gamma_integrals(gamma)
    best = -math.inf
    for fam in enumerate_antichains(tree):
        val = math.fsum(
            float(tree.osc2[j][k]) - float(gints[j][k]) for j, k in fam
        )
        best = max(best, val)
    return best


@dataclass
class OracleOutcome:
    trials: int
    worst_jn_err: float
    worst_front_err: float
    worst_slack_err: float

    @property
    def worst(self) -> float:
        return max(self.worst_jn_err, self.worst_front_err, self.worst_slack_err)

    def ok(self, tol: float = 1e-12) -> bool:
        return self.worst <= tol

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "worst_jn_err": self.worst_jn_err,
            "worst_front_err": self.worst_front_err,
            "worst_slack_err": self.worst_slack_err,
            "worst": self.worst,
        }


def run_oracle(
    dim: int = 1,
    max_level: int = 3,
    trials: int = 100,
    seed: int = 0,
    ps: tuple[float, ...] = (1.5, 2.0, 3.0),
) -> OracleOutcome:
    """Random grid functions vs exhaustive enumeration.

    Each trial draws a level in [1, max_level], random cells, and a random
    non-negative majorant candidate at one of three scales (so membership
    goes both ways), then cross-checks jn_norm, the exact-budget front and
    gamma_slack.
    """
    rng = np.random.default_rng(seed)
    worst_jn = worst_front = worst_slack = 0.0
    for trial in range(trials):
        level = int(rng.integers(1, max_level + 1))
        n_cells = 1 << (dim * level)
        g = GridFunction(dim, level, rng.standard_normal(n_cells))
        tree = build_stats(g)

        for p in ps:
            worst_jn = max(worst_jn, _rel_err(jn_norm(tree, p), brute_jn(tree, p)))

        front = garo_front(tree, mode="exact_budget")
        brute_points = brute_front_points(tree)
        if len(front) != len(brute_points):
            worst_front = math.inf
        else:
            for (ma, oa), (mb, ob) in zip(front.points, brute_points):
                worst_front = max(worst_front, _rel_err(ma, mb), _rel_err(oa, ob))

        scale = (0.3, 1.0, 3.0)[trial % 3]
        gamma = GridFunction(
            dim, level, scale * np.abs(rng.standard_normal(n_cells))
        )
        worst_slack = max(
            worst_slack, _rel_err(gamma_slack(tree, gamma), brute_slack(tree, gamma))
        )
    return OracleOutcome(
        trials=trials,
        worst_jn_err=worst_jn,
        worst_front_err=worst_front,
        worst_slack_err=worst_slack,
    )
