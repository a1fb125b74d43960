"""Oscillation-based function-space norms on dyadic grids over the unit cube.

Computes mean-oscillation partition norms, decreasing-rearrangement norms,
fractional smoothness seminorms and local Riesz potentials for cell-averaged
functions, and verifies the embedding inequalities relating them.  All cube
suprema range over grid-aligned dyadic cubes: exact for the discrete problem,
lower bounds for the continuum one.

The hot kernels (pairwise singular sums, tree-knapsack merges) run through a
compiled Cython core when built, with a numpy fallback selected at import;
see :func:`backend_name` and the OSCNORM_BACKEND environment variable.
"""

from ._backend import backend_name
from .checks import (
    CHECK_NAMES,
    CorpusItem,
    FunctionContext,
    InequalityReport,
    default_corpus,
    run_check,
    run_suite,
    suite_summary,
)
from .cubes import (
    CubeStats,
    CubeStatsTree,
    DyadicCube,
    build_stats,
    morton_permutation,
    pairsum_sorted,
)
from .czdecomp import CzDecomposition, KComparison, cz_decompose, cz_k_compare
from .fractional import (
    FracParams,
    KernelTable,
    gagliardo_field,
    gagliardo_seminorm,
    kernel_table,
    riesz_potential,
    sobolev_witness,
    w_alpha_pY_norm,
    witness_constant,
)
from .grid import (
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
from .oracle import OracleOutcome, run_oracle
from .oscillation import (
    EXACT_BUDGET_LIMIT,
    FamilySelection,
    ParetoFront,
    bbm_norm,
    bmo_norm,
    brute_force_families,
    enumerate_antichains,
    gamma_slack,
    gamma_slack_family,
    garoX_upper,
    garo_front,
    garo_infty_norm,
    garo_norm,
    jn_norm,
    validate_antichain,
)
from .rearrangement import (
    RiSpaceSpec,
    StepFunction,
    distribution,
    kfunctional,
    maximal_average,
    rearr,
    reconstruction_rhs,
    ri_norm,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "backend_name",
    # grid
    "GridFunction",
    "GeneratorSpec",
    "generate",
    "mean",
    "integral",
    "subtract_mean",
    "refine",
    "load",
    "store",
    # cubes
    "DyadicCube",
    "CubeStats",
    "CubeStatsTree",
    "build_stats",
    "pairsum_sorted",
    "morton_permutation",
    # rearrangement
    "StepFunction",
    "RiSpaceSpec",
    "rearr",
    "distribution",
    "maximal_average",
    "kfunctional",
    "ri_norm",
    "reconstruction_rhs",
    # oscillation norms
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
    # fractional
    "FracParams",
    "KernelTable",
    "kernel_table",
    "gagliardo_field",
    "gagliardo_seminorm",
    "riesz_potential",
    "sobolev_witness",
    "witness_constant",
    "w_alpha_pY_norm",
    # Calderon-Zygmund
    "CzDecomposition",
    "KComparison",
    "cz_decompose",
    "cz_k_compare",
    # verification
    "InequalityReport",
    "FunctionContext",
    "run_check",
    "run_suite",
    "suite_summary",
    "default_corpus",
    "CorpusItem",
    "CHECK_NAMES",
    # oracle
    "OracleOutcome",
    "run_oracle",
]
