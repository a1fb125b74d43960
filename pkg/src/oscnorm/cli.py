"""Command-line front end.

Subcommands: gen (write a grid-function CSV), norms (oscillation and r.i.
norms as JSON), sobolev (smoothness field, seminorms and the majorant
bound), verify (the inequality suite), oracle (brute-force cross-checks),
rearrange (dump the decreasing rearrangement).

Exit codes: 0 success, 1 check failure, 2 usage error.  JSON output is
deterministic for a fixed configuration and seed; numbers carry 17
significant digits.  OSCNORM_THREADS parallelizes verify over functions.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import backend_name
from .checks import (
    default_corpus,
    run_suite,
    suite_jobs_from_env,
    suite_summary,
)
from .cubes import build_stats
from .fractional import (
    FracParams,
    gagliardo_field,
    gagliardo_seminorm,
    sobolev_witness,
)
from .grid import GeneratorSpec, GridFunction, generate, load, mean, store
from .jsonfmt import render_json
from .oracle import run_oracle
from .oscillation import (
    bbm_norm,
    bmo_norm,
    gamma_slack_family,
    garo_front,
    garo_norm,
    jn_norm,
)
from .rearrangement import RiSpaceSpec, rearr, ri_norm

SCHEMA_VERSION = 1

_GEN_ALIASES = {
    "step01": "step:0.5,0,1",
}


def parse_generator(text: str) -> GeneratorSpec:
    """Compact generator syntax, e.g. 'constant:5', 'step01',
    'power:beta=0.5,center=0,order=16', 'indicator:0.25,0.75',
    'checkerboard:2', 'random:7,normal'."""
    text = _GEN_ALIASES.get(text.strip(), text.strip())
    kind, _, argstr = text.partition(":")
    kind = kind.strip()
    args = [a.strip() for a in argstr.split(",") if a.strip()] if argstr else []
    positional: list[str] = []
    keywords: dict[str, str] = {}
    for arg in args:
        if "=" in arg:
            key, _, val = arg.partition("=")
            keywords[key.strip()] = val.strip()
        else:
            positional.append(arg)

    def center_from(val: str) -> tuple[float, ...]:
        return tuple(float(x) for x in val.split("|"))

    try:
        if kind == "constant":
            return GeneratorSpec("constant", constant=float(positional[0]))
        if kind == "indicator":
            vals = [float(x) for x in positional]
            if len(vals) % 2:
                raise ValueError("indicator needs an even number of bounds")
            bounds = tuple(
                (vals[i], vals[i + 1]) for i in range(0, len(vals), 2)
            )
            return GeneratorSpec("indicator", bounds=bounds)
        if kind == "step":
            thr = float(positional[0]) if positional else float(
                keywords.get("threshold", 0.5)
            )
            low = float(positional[1]) if len(positional) > 1 else float(
                keywords.get("low", 0.0)
            )
            high = float(positional[2]) if len(positional) > 2 else float(
                keywords.get("high", 1.0)
            )
            axis = int(keywords.get("axis", 0))
            return GeneratorSpec("step", threshold=thr, low=low, high=high, axis=axis)
        if kind in ("power", "logsing"):
            beta = float(keywords.get("beta", positional[0] if positional else 0.5))
            center = center_from(keywords.get("center", "0"))
            order = int(keywords.get("order", 16))
            return GeneratorSpec(kind, beta=beta, center=center, order=order)
        if kind == "checkerboard":
            period = int(positional[0]) if positional else int(
                keywords.get("period", 1)
            )
            return GeneratorSpec("checkerboard", period=period)
        if kind == "random":
            seed = int(positional[0]) if positional else int(keywords.get("seed", 0))
            dist = (
                positional[1]
                if len(positional) > 1
                else keywords.get("distribution", "normal")
            )
            return GeneratorSpec("random", seed=seed, distribution=dist)
    except (IndexError, ValueError) as exc:
        raise ValueError(f"cannot parse generator {text!r}: {exc}") from exc
    raise ValueError(f"unknown generator kind {kind!r}")


def parse_ri_space(text: str) -> RiSpaceSpec:
    """'lq:2', 'lorentz:2,1.5' (r may be inf), 'weaklp:2', 'weaklinfty',
    'bw:4'."""
    kind, _, argstr = text.strip().lower().partition(":")
    args = [a.strip() for a in argstr.split(",") if a.strip()] if argstr else []
    if kind == "lq":
        return RiSpaceSpec.lebesgue(float(args[0]))
    if kind == "lorentz":
        return RiSpaceSpec.lorentz(float(args[0]), float(args[1]))
    if kind == "weaklp":
        return RiSpaceSpec.weak_lp(float(args[0]))
    if kind == "weaklinfty":
        return RiSpaceSpec.weak_linfty()
    if kind == "bw":
        return RiSpaceSpec.brezis_wainger(float(args[0]))
    raise ValueError(f"unknown r.i. space {text!r}")


def _load_input(ns: argparse.Namespace) -> GridFunction:
    if ns.input is not None:
        return load(Path(ns.input).read_text())
    if ns.gen is None:
        raise ValueError("need either --in FILE or --gen SPEC")
    if ns.dim is None or ns.level is None:
        raise ValueError("--gen requires --dim and --level")
    return generate(parse_generator(ns.gen), ns.dim, ns.level)


def _write_output(ns: argparse.Namespace, text: str) -> None:
    if ns.out is None or ns.out == "-":
        sys.stdout.write(text)
    else:
        Path(ns.out).write_text(text)


def _levels_arg(raw: str | None):
    if raw is None:
        return None
    raw = raw.strip()
    if ".." in raw:
        lo, _, hi = raw.partition("..")
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(x) for x in raw.split(","))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="oscnorm",
        description="Oscillation-based function-space norms on dyadic grids "
        "and their embedding-inequality suite.",
    )
    parser.add_argument("--version", action="version", version=f"oscnorm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_input_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--in", dest="input", metavar="FILE", help="grid CSV input")
        p.add_argument("--gen", help="generator spec, e.g. 'step01', 'power:beta=0.5'")
        p.add_argument("--dim", type=int, help="dimension for --gen")
        p.add_argument("--level", type=int, help="grid level for --gen")
        p.add_argument("--out", help="output path (default stdout)")

    p_gen = sub.add_parser("gen", help="generate a grid function CSV")
    add_input_args(p_gen)

    p_norms = sub.add_parser("norms", help="compute the oscillation and r.i. norms")
    add_input_args(p_norms)
    p_norms.add_argument("--p", type=float, default=2.0)
    p_norms.add_argument("--q", type=float, help="Lebesgue exponent (default: p)")
    p_norms.add_argument("--s", type=float, help="Lorentz primary exponent")
    p_norms.add_argument("--r", type=float, help="Lorentz secondary exponent")
    p_norms.add_argument("--alpha", type=float, help="smoothness order for BW norm")
    p_norms.add_argument(
        "--witnesses",
        action="store_true",
        help="include the Pareto front and its witness cube families",
    )

    p_sob = sub.add_parser("sobolev", help="smoothness field, seminorm and majorant")
    add_input_args(p_sob)
    p_sob.add_argument("--alpha", type=float, required=True)
    p_sob.add_argument("--p", type=float, required=True)
    p_sob.add_argument("--Y", dest="space_y", help="r.i. space for the field norm")
    p_sob.add_argument("--X", dest="space_x", help="r.i. space for the majorant bound")

    p_ver = sub.add_parser("verify", help="run the inequality suite")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--dims", default="1,2")
    p_ver.add_argument("--levels", help="e.g. 3..6 or 3,4,5")
    p_ver.add_argument("--checks", help="comma-separated check names (default all)")
    p_ver.add_argument("--out", help="report path (default stdout)")

    p_or = sub.add_parser("oracle", help="brute-force cross-checks of the DPs")
    p_or.add_argument("--dim", type=int, default=1)
    p_or.add_argument("--max-level", type=int, default=3)
    p_or.add_argument("--trials", type=int, default=100)
    p_or.add_argument("--seed", type=int, default=7)
    p_or.add_argument("--out", help="output path (default stdout)")

    p_re = sub.add_parser("rearrange", help="dump the decreasing rearrangement")
    add_input_args(p_re)
    return parser


def _cmd_gen(ns: argparse.Namespace) -> int:
    g = _load_input(ns)
    _write_output(ns, store(g))
    return 0


def _cmd_norms(ns: argparse.Namespace) -> int:
    g = _load_input(ns)
    tree = build_stats(g)
    front = garo_front(tree, mode="auto")
    sf = rearr(g)
    p = ns.p
    osc1_form, osc2_form = bmo_norm(tree)
    norms: dict = {
        "jn": jn_norm(tree, p),
        "garo": garo_norm(front, p),
        "bbm": bbm_norm(tree, p),
        "bmo_osc1": osc1_form,
        "bmo_osc2": osc2_form,
        "weak_lp": ri_norm(sf, RiSpaceSpec.weak_lp(p)),
        "weak_linfty": ri_norm(sf, RiSpaceSpec.weak_linfty()),
        "l1": sf.l1,
        "lq": ri_norm(sf, RiSpaceSpec.lebesgue(ns.q if ns.q else p)),
    }
    if ns.s is not None:
        r = ns.r if ns.r is not None else ns.s
        norms["lorentz"] = ri_norm(sf, RiSpaceSpec.lorentz(ns.s, r))
    if ns.alpha is not None and g.dim / ns.alpha > 1.0:
        norms["brezis_wainger"] = ri_norm(
            sf, RiSpaceSpec.brezis_wainger(g.dim / ns.alpha)
        )
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "norms",
        "backend": backend_name(),
        "dim": g.dim,
        "level": g.level,
        "mode": "dyadic",
        "front_mode": front.mode,
        "params": {"p": p, "q": ns.q, "s": ns.s, "r": ns.r, "alpha": ns.alpha},
        "norms": norms,
    }
    if ns.witnesses:
        doc["front"] = [
            {
                "measure": float(front.measures[i]),
                "oscillation": float(front.oscillations[i]),
                "cubes": [
                    {"level": c.level, "index": list(c.index)}
                    for c in front.witness(i).cubes
                ],
            }
            for i in range(len(front))
        ]
    _write_output(ns, render_json(doc))
    return 0


def _cmd_sobolev(ns: argparse.Namespace) -> int:
    g = _load_input(ns)
    fp = FracParams(alpha=ns.alpha, p=ns.p)
    tree = build_stats(g)
    field = gagliardo_field(g, fp)
    seminorm = gagliardo_seminorm(g, fp)
    space_y = (
        parse_ri_space(ns.space_y) if ns.space_y else RiSpaceSpec.lebesgue(fp.p)
    )
    q = fp.conjugate_q(g.dim)
    if ns.space_x:
        space_x = parse_ri_space(ns.space_x)
    elif math.isinf(q):
        space_x = RiSpaceSpec.brezis_wainger(g.dim / fp.alpha)
    else:
        space_x = RiSpaceSpec.lebesgue(q)
    witness = sobolev_witness(g, fp)
    slack, fam = gamma_slack_family(tree, witness)
    field_sf = rearr(field)
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "sobolev",
        "backend": backend_name(),
        "dim": g.dim,
        "level": g.level,
        "mode": "dyadic",
        "params": {"alpha": fp.alpha, "p": fp.p, "q": q if math.isfinite(q) else None},
        "field": {
            "min": float(np.min(field.cells)),
            "max": float(np.max(field.cells)),
            "mean": mean(field),
            "l1": field_sf.l1,
            "lp": ri_norm(field_sf, RiSpaceSpec.lebesgue(fp.p)),
        },
        "seminorm": seminorm,
        "w_alpha_pY": {"space": space_y.label(), "value": ri_norm(field_sf, space_y)},
        "witness_slack": slack,
        "witness_family_size": len(fam.cubes),
        "garoX_upper": {
            "space": space_x.label(),
            "value": ri_norm(rearr(witness), space_x),
            "admissible": bool(slack <= 1e-9),
        },
    }
    _write_output(ns, render_json(doc))
    return 0


def _cmd_verify(ns: argparse.Namespace) -> int:
    dims = tuple(int(d) for d in ns.dims.split(","))
    levels = _levels_arg(ns.levels)
    checks = (
        [c.strip() for c in ns.checks.split(",") if c.strip()] if ns.checks else None
    )
    corpus = default_corpus(seed=ns.seed, dims=dims, levels=levels)
    reports = run_suite(corpus=corpus, checks=checks, jobs=suite_jobs_from_env())
    summary = suite_summary(reports)
    failures = sum(entry["failures"] for entry in summary.values())
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "verify",
        "backend": backend_name(),
        "seed": ns.seed,
        "dims": list(dims),
        "corpus_size": len(corpus),
        "failures": failures,
        "summary": summary,
        "reports": [r.to_dict() for r in reports],
    }
    _write_output(ns, render_json(doc))
    return 0 if failures == 0 else 1


def _cmd_oracle(ns: argparse.Namespace) -> int:
    outcome = run_oracle(
        dim=ns.dim, max_level=ns.max_level, trials=ns.trials, seed=ns.seed
    )
    doc = {
        "schema_version": SCHEMA_VERSION,
        "command": "oracle",
        "backend": backend_name(),
        "params": {
            "dim": ns.dim,
            "max_level": ns.max_level,
            "trials": ns.trials,
            "seed": ns.seed,
        },
        "outcome": outcome.to_dict(),
        "ok": outcome.ok(),
    }
    _write_output(ns, render_json(doc))
    return 0 if outcome.ok() else 1


def _cmd_rearrange(ns: argparse.Namespace) -> int:
    g = _load_input(ns)
    sf = rearr(g)
    lines = ["breakpoint,value"]
    for left, val in zip(sf.breakpoints[:-1], sf.values):
        lines.append(f"{left:.17g},{val:.17g}")
    _write_output(ns, "\n".join(lines) + "\n")
    return 0


_COMMANDS = {
    "gen": _cmd_gen,
    "norms": _cmd_norms,
    "sobolev": _cmd_sobolev,
    "verify": _cmd_verify,
    "oracle": _cmd_oracle,
    "rearrange": _cmd_rearrange,
}


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    try:
        return _COMMANDS[ns.command](ns)
    except (ValueError, OSError) as exc:
        print(f"oscnorm {ns.command}: error: {exc}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
