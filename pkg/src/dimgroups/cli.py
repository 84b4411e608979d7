"""Command-line front end.

Exit codes: 0 success or verdict true, 1 verdict false or ProFD,
2 inconclusive or unknown, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from typing import Any, Callable, Optional, Sequence

from . import brattree, certify, discretelab, initial, limitgroup
from .config import FORMATS, SUBCOMMANDS, ConfigError, RunConfig, build_config, load_file
from .laurent import parse_poly
from .limitgroup import MembershipError, PolySequence
from .verdict import Truth, Verdict, frac_str, to_plain

EXIT_OK, EXIT_FALSE, EXIT_UNKNOWN, EXIT_USAGE = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _verdict_code(v: Verdict) -> int:
    return {Truth.TRUE: EXIT_OK, Truth.FALSE: EXIT_FALSE, Truth.UNKNOWN: EXIT_UNKNOWN}[v.value]


def _split(text: Optional[str], sep: str = ";") -> Optional[list[str]]:
    if text is None:
        return None
    return [s.strip() for s in text.split(sep) if s.strip()]


def _pairs(text: Optional[str]) -> Optional[list[list[int]]]:
    if text is None:
        return None
    try:
        return [[int(x) for x in item.split(",")] for item in _split(text) or []]
    except ValueError:
        raise UsageError(f"bad pair list {text!r}; expected e.g. '5,2;17,2'") from None


def _ints(text: Optional[str]) -> Optional[list[int]]:
    if text is None:
        return None
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"bad integer list {text!r}") from None


# ---------------------------------------------------------------- subcommands


def _sequence(cfg: RunConfig) -> PolySequence:
    if not (cfg.prefix or cfg.period or cfg.rule):
        raise UsageError("give a sequence: --prefix, --period or --rule")
    return PolySequence(cfg.prefix, period=cfg.period, rule=cfg.rule, rule_period=cfg.rule_period)


def run_certify(cfg: RunConfig) -> tuple[int, dict]:
    seq = _sequence(cfg)
    report = certify.antifd_verdict(seq)
    data = report.to_dict()
    data["bifurcation"] = certify.bifurcate(seq).to_dict()
    return report.exit_code, data


def _range_dict(tr: limitgroup.TraceRange) -> dict:
    return {"multipliers": list(tr.multipliers), "dense": tr.dense, "prefix_relative": tr.prefix_relative}


def run_traces(cfg: RunConfig) -> tuple[int, dict]:
    seq = _sequence(cfg)
    data: dict[str, Any] = {
        "tau_zero_range": _range_dict(limitgroup.trace_range_zero(seq, cfg.trace_stages)),
        "tau_infinity_range": _range_dict(limitgroup.trace_range_infty(seq, cfg.trace_stages)),
    }
    code = EXIT_OK
    if cfg.element is not None:
        e = limitgroup.make_element(seq, cfg.element, cfg.element_stage)
        verdict = limitgroup.is_positive(e, cfg.stage_cap)
        data["element"] = {
            "canonical": repr(e),
            "tau_zero": limitgroup.trace_zero(e),
            "tau_infinity": limitgroup.trace_infty(e),
            "positive": verdict.to_dict(),
        }
        code = _verdict_code(verdict)
    return code, data


def _target(cfg: RunConfig) -> tuple[initial.DyadicVectorGroup, tuple]:
    G = initial.DyadicVectorGroup(cfg.dim, cfg.base)
    u = G.unit() if cfg.unit is None else G.element(Fraction(str(x)) for x in cfg.unit)
    return G, u


def run_initial_hom(cfg: RunConfig) -> tuple[int, dict]:
    if not cfg.pairs:
        raise UsageError("give --pairs, e.g. '5,2;17,2;257,2'")
    if any(len(p) != 2 for p in cfg.pairs):
        raise UsageError("each pair needs exactly two integers")
    seq = initial.BinomialSequence([tuple(p) for p in cfg.pairs])
    G, u = _target(cfg)
    n = len(seq) if cfg.stages is None else cfg.stages
    H = initial.build_initial_hom(seq, G, u, n)
    data = H.to_dict()
    code = EXIT_OK
    if cfg.verify:
        bad = H.verify()
        phi = initial.phi_norm_bound_check(H)
        data["verification"] = {"failures": bad, "norm_inequality": phi.holds}
        code = EXIT_OK if not bad and phi.holds else EXIT_FALSE
    return code, data


def _tree(cfg: RunConfig) -> brattree.WeightedTree:
    if cfg.levels is not None:
        return brattree.WeightedTree(cfg.levels, period=cfg.tree_period)
    if cfg.weights is not None:
        return brattree.WeightedTree.uniform(cfg.weights)
    if cfg.tree_period is not None:
        return brattree.WeightedTree(period=cfg.tree_period)
    raise UsageError("give --weights or a [tree] levels/period table")


def run_tree(cfg: RunConfig) -> tuple[int, Any]:
    tree = _tree(cfg)
    if not tree.materialized(cfg.depth):
        raise UsageError(f"tree data ends at depth {tree.explicit_depth}")
    if cfg.export_dot:
        return EXIT_OK, brattree.export_dot(tree, cfg.depth)
    init = brattree.tree_initial_check(tree, cfg.depth)
    div = brattree.tree_approx_div_check(tree, cfg.depth)
    data = {"initial": init.to_dict(), "approximately_divisible": div.to_dict()}
    code = EXIT_OK if init.is_true and div.is_true else EXIT_FALSE
    return code, data


def run_lab(cfg: RunConfig) -> tuple[int, dict]:
    if cfg.example == "monomials":
        half = (Fraction(1, 3), Fraction(2, 3))
        gens = [discretelab.FunctionGenerator.monomial(k, *half) for k in range(cfg.lab_degree + 1)]
        vecs = discretelab.coefficient_vectors(gens)
        return EXIT_OK, {"example": "monomials", "degree": cfg.lab_degree, "discrete": discretelab.is_discrete(vecs)}
    if cfg.example == "tower":
        gens = discretelab.build_example_2_4(cfg.lab_n)
        w = discretelab.min_norm_search(gens, cfg.bound)
        tw = discretelab.discrete_trace_witness(gens, 1)
        return EXIT_OK, {
            "example": "tower",
            "generators": cfg.lab_n,
            "discrete": discretelab.is_discrete(gens),
            "second_coordinate_c": tw.c_fraction() if tw.discrete else None,
            "numeric": {"min_norm": w.norm if w else None, "coefficients": list(w.coeffs) if w else None, "bound": cfg.bound},
        }
    if cfg.example == "critical":
        model = discretelab.build_critical(cfg.m)
        at_m = discretelab.antifd_m_check(model, cfg.m)
        above = discretelab.antifd_m_check(model, cfg.m + 1)
        return EXIT_OK, {
            "example": "critical",
            "m": cfg.m,
            "refuted_at_m": at_m.refuted,
            "refuted_at_m_plus_1": above.refuted,
            "witness": [list(c) for c in above.witness],
        }
    raise UsageError(f"unknown lab example {cfg.example!r}; choose monomials, tower or critical")


def run_approx(cfg: RunConfig) -> tuple[int, dict]:
    if len(cfg.interval) != 2:
        raise UsageError("interval needs two endpoints")
    a, b = (Fraction(str(x)) for x in cfg.interval)
    gens = [discretelab.FunctionGenerator.monomial(k, a, b) for k in range(cfg.degree + 1)]
    target = parse_poly(cfg.target) if "x" in cfg.target else Fraction(cfg.target)
    if not isinstance(target, Fraction):
        dense, lo = target.dense()
        if lo < 0:
            raise UsageError("target must be a polynomial or a rational constant")
        target = discretelab.FunctionGenerator(tuple([0] * lo + dense), a, b)
    try:
        res = discretelab.approximate_in_span(target, gens, Fraction(cfg.eps))
    except discretelab.ApproximationError as exc:
        return EXIT_UNKNOWN, {"error": str(exc)}
    data = {
        "coefficients": list(res.coeffs),
        "grid_error": res.grid_error,
        "certified_error": res.certified_error,
        "certified": res.certified,
    }
    return (EXIT_OK if res.certified else EXIT_UNKNOWN), data


HANDLERS: dict[str, Callable[[RunConfig], tuple[int, Any]]] = {
    "certify": run_certify,
    "traces": run_traces,
    "initial-hom": run_initial_hom,
    "tree": run_tree,
    "lab": run_lab,
    "approx": run_approx,
}


def run(cfg: RunConfig) -> tuple[int, Any]:
    """Dispatch to the owning module; returns (exit code, report)."""
    return HANDLERS[cfg.subcommand](cfg)


# ---------------------------------------------------------------- rendering


def _human_value(v: Any) -> str:
    if isinstance(v, dict) and set(v) == {"frac"}:
        return v["frac"]
    if isinstance(v, dict) and set(v) == {"poly"}:
        return v["poly"]
    if isinstance(v, list):
        return "[" + ", ".join(_human_value(x) for x in v) + "]"
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_human_value(x)}" for k, x in v.items()) + "}"
    if isinstance(v, bool) or v is None:
        return str(v).lower() if v is not None else "none"
    return str(v)


def render_human(data: Any, indent: int = 0) -> str:
    if isinstance(data, str):
        return data
    pad = "  " * indent
    lines = []
    for k, v in data.items():
        if isinstance(v, dict) and set(v) not in ({"frac"}, {"poly"}) and v:
            lines.append(f"{pad}{k}:")
            lines.append(render_human(v, indent + 1))
        elif isinstance(v, list) and v and all(isinstance(x, dict) and "name" in x for x in v):
            lines.append(f"{pad}{k}:")
            for item in v:
                lines.append(f"{pad}  - {_human_value(item)}")
        else:
            lines.append(f"{pad}{k}: {_human_value(v)}")
    return "\n".join(lines)


def render(data: Any, fmt: str) -> str:
    if isinstance(data, str):
        return data
    plain = to_plain(data)
    if fmt == "structured":
        return json.dumps(plain, indent=2) + "\n"
    return render_human(plain) + "\n"


# ---------------------------------------------------------------- argument parsing


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="dimgroups", description="Exact computations with polynomial and tree dimension groups.")
    p.add_argument("subcommand", choices=SUBCOMMANDS)
    p.add_argument("--config", help="TOML config file; flags override its values")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out", help="write the report (or DOT) to this file")
    p.add_argument("--stage-cap", type=int, dest="stage_cap")
    p.add_argument("--mult-cap", type=int, dest="mult_cap")
    p.add_argument("--retries", type=int)
    g = p.add_argument_group("sequence")
    g.add_argument("--prefix", help="semicolon-separated polynomials, e.g. '1+x;2+3x'")
    g.add_argument("--period", help="semicolon-separated periodic tail")
    g.add_argument("--rule", help="tail formula in i, e.g. '2 + 3x^(2^i)'")
    g.add_argument("--rule-period", type=int, dest="rule_period")
    g.add_argument("--trace-stages", type=int, dest="trace_stages")
    g.add_argument("--element", help="numerator f of [f, n]")
    g.add_argument("--element-stage", type=int, dest="element_stage")
    g = p.add_argument_group("initial-hom")
    g.add_argument("--pairs", help="pairs a,b separated by semicolons; stage n uses a_n + b_n x")
    g.add_argument("--stages", type=int)
    g.add_argument("--verify", action="store_true", default=None)
    g.add_argument("--dim", type=int)
    g.add_argument("--base", type=int)
    g.add_argument("--unit", help="comma-separated order unit of the target")
    g = p.add_argument_group("tree")
    g.add_argument("--weights", help="uniform multiplicity vector, e.g. '2,3'")
    g.add_argument("--depth", type=int)
    g.add_argument("--export-dot", action="store_true", default=None, dest="export_dot")
    g = p.add_argument_group("lab / approx")
    g.add_argument("--example", choices=("monomials", "tower", "critical"))
    g.add_argument("--n", type=int, dest="lab_n")
    g.add_argument("--bound", type=int)
    g.add_argument("--m", type=int)
    g.add_argument("--target")
    g.add_argument("--interval", help="two endpoints, e.g. '1/3,2/3'")
    g.add_argument("--eps")
    g.add_argument("--degree", type=int)
    return p


def parse_config(argv: Optional[Sequence[str]]) -> RunConfig:
    args = build_parser().parse_args(argv)
    file_values = load_file(args.config) if args.config else {}
    over = {
        "subcommand": args.subcommand,
        "format": args.format,
        "out": args.out,
        "stage_cap": args.stage_cap,
        "mult_cap": args.mult_cap,
        "retries": args.retries,
        "prefix": _split(args.prefix),
        "period": _split(args.period),
        "rule": args.rule,
        "rule_period": args.rule_period,
        "trace_stages": args.trace_stages,
        "element": args.element,
        "element_stage": args.element_stage,
        "pairs": _pairs(args.pairs),
        "stages": args.stages,
        "verify": args.verify,
        "dim": args.dim,
        "base": args.base,
        "unit": _split(args.unit, ","),
        "weights": _ints(args.weights),
        "depth": args.depth,
        "export_dot": args.export_dot,
        "example": args.example,
        "lab_n": args.lab_n,
        "bound": args.bound,
        "m": args.m,
        "target": args.target,
        "interval": _split(args.interval, ","),
        "eps": args.eps,
        "degree": args.degree,
    }
    return build_config(file_values, over)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        cfg = parse_config(argv)
        code, data = run(cfg)
    except (UsageError, ConfigError, MembershipError, ValueError, ZeroDivisionError) as exc:
        print(f"dimgroups: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (initial.ApproximationFailure, discretelab.ApproximationError) as exc:
        print(f"dimgroups: {exc} (retry with larger caps)", file=sys.stderr)
        return EXIT_UNKNOWN
    text = render(data, cfg.format)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
