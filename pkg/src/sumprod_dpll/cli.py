"""Command-line front end: ``sumprod-dpll count|decompose|width|generate|sumprod``."""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

from . import counters
from .decomposition import (BranchDecomp, ElimOrder, Heuristic, PseudoTree,
                            branchdec_from_order, complete_static_order, heuristic_order,
                            hypergraph_of, induced_width, primal_graph, pseudo_tree_from_order,
                            static_order_from_branchdec, treedec_from_order, validate, width_of)
from .errors import InvalidDecomposition, ParseError, SumProdError, TautologyError
from .formula import brute_force_probability
from .generators import gen_blocks, gen_pearls, gen_random
from .io import (RunReport, emit_stats, format_value, parse_decomp, parse_dimacs,
                 parse_factor_file, serialize_decomp, serialize_dimacs)
from .reference import Mode, ao_solve, rc_solve, ve_solve
from .search import OrderPolicy, SearchStats
from .semiring import SEMIRINGS, brute_force_sumprod, encode_cnf_as_instance, sumprod_dpll_cache

COUNT_ALGOS = ("dpll", "simple-cache", "comp-cache", "comp-space", "ve",
               "rc-space", "rc-cache", "ao-space", "ao-cache", "brute")
SUMPROD_ALGOS = ("ve", "rc-cache", "ao-cache", "dpll-cache", "brute")


class UsageError(Exception):
    pass


def _read(path) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_decomp(path, expect=None):
    return parse_decomp(_read(path), expect) if path else None


def _parse_order(spec: str, num_vars: int, unit_propagation: bool, decomp) -> OrderPolicy:
    if spec == "dynamic":
        if decomp is not None:
            return OrderPolicy.static(_static_from_decomp(decomp, num_vars), unit_propagation)
        return OrderPolicy.dynamic(unit_propagation)
    if spec.startswith("random:"):
        try:
            return OrderPolicy.random(int(spec.split(":", 1)[1]), unit_propagation)
        except ValueError:
            raise UsageError(f"bad random seed in {spec!r}") from None
    if spec.startswith("static-file:"):
        text = _read(spec.split(":", 1)[1])
        if text.lstrip().startswith("{"):
            order = _static_from_decomp(parse_decomp(text), num_vars)
        else:
            try:
                order = [int(t) for t in text.split()]
            except ValueError:
                raise ParseError("static order file must list variable ids") from None
        order = complete_static_order(order, num_vars)
        if sorted(order) != list(range(1, num_vars + 1)):
            raise ParseError("static order repeats or names unknown variables")
        return OrderPolicy.static(order, unit_propagation)
    raise UsageError(f"unknown --order {spec!r}")


def _static_from_decomp(d, num_vars):
    if isinstance(d, ElimOrder):
        order = list(d.order)
    elif isinstance(d, BranchDecomp):
        order = static_order_from_branchdec(d)
    else:
        raise UsageError("a static order needs an order or branch decomposition document")
    return complete_static_order(order, num_vars)


def _structure_for(algo, inst, decomp):
    """The decomposition an instance-based algorithm runs on, derived if absent."""
    h = hypergraph_of(inst)
    if algo == "ve":
        if decomp is None:
            return heuristic_order(h)
        if not isinstance(decomp, ElimOrder):
            raise InvalidDecomposition("ve needs an elimination order document")
        return decomp
    if algo.startswith("rc"):
        if decomp is None:
            return branchdec_from_order(h, heuristic_order(h)) if h.edges else None
        if not isinstance(decomp, BranchDecomp):
            raise InvalidDecomposition("rc needs a branch decomposition document")
        return decomp
    if algo.startswith("ao"):
        if decomp is None:
            return pseudo_tree_from_order(primal_graph(h), heuristic_order(h))
        if not isinstance(decomp, PseudoTree):
            raise InvalidDecomposition("ao needs a pseudo tree document")
        return decomp
    return None


def _run_instance_algo(algo, inst, decomp):
    structure = _structure_for(algo, inst, decomp)
    if algo == "ve":
        return ve_solve(inst, structure), SearchStats()
    if algo in ("rc-space", "rc-cache"):
        return rc_solve(inst, structure, Mode.Space if algo == "rc-space" else Mode.Cache)
    if algo in ("ao-space", "ao-cache"):
        return ao_solve(inst, structure, Mode.Space if algo == "ao-space" else Mode.Cache)
    if algo == "dpll-cache":
        return sumprod_dpll_cache(inst)
    if algo == "brute":
        return brute_force_sumprod(inst), SearchStats()
    raise UsageError(f"unknown algorithm {algo!r}")


def solve_cnf(f, algo: str, policy: OrderPolicy = None, decomp=None):
    """Run one ``count`` algorithm on ``f``; returns ``(probability, stats)``."""
    policy = policy or OrderPolicy.dynamic()
    if algo == "dpll":
        return counters.count_dpll(f, policy)
    if algo == "simple-cache":
        return counters.count_simple_cache(f, policy)
    if algo in ("comp-cache", "comp-space"):
        return counters.count_component_cache(f, policy, space_mode=algo == "comp-space")
    if algo == "brute":
        return brute_force_probability(f), SearchStats()
    if algo not in COUNT_ALGOS:
        raise UsageError(f"unknown algorithm {algo!r}")
    value, stats = _run_instance_algo(algo, encode_cnf_as_instance(f), decomp)
    # unweighted variables were summed to a count, weighted ones to a probability
    return Fraction(value) / (1 << (f.num_vars - len(f.weights))), stats


def cmd_count(args) -> int:
    f = parse_dimacs(_read(args.cnf))
    decomp = _load_decomp(args.decomp)
    policy = _parse_order(args.order, f.num_vars, not args.no_up, decomp
                          if args.algo in ("dpll", "simple-cache", "comp-cache", "comp-space") else None)
    start = time.perf_counter()
    prob, stats = solve_cnf(f, args.algo, policy, decomp)
    wall_ms = (time.perf_counter() - start) * 1000
    stats.value = prob
    if f.is_uniform:
        shown = prob * (1 << f.num_vars)
        line = f"s COUNT {format_value(shown)}" if shown.denominator == 1 else f"s VALUE {format_value(shown)}"
    else:
        shown = prob
        line = f"s VALUE {format_value(prob)}" if prob.denominator != 1 else f"s COUNT {format_value(prob)}"
    print(line)
    if args.stats:
        emit_stats(RunReport(str(args.cnf), args.algo, policy.describe(), format_value(shown), stats,
                             round(wall_ms, 3)), args.stats)
    return 0


def cmd_decompose(args) -> int:
    f = parse_dimacs(_read(args.cnf))
    h = hypergraph_of(f)
    pi = heuristic_order(h, Heuristic(args.method), args.seed)
    if args.emit == "order":
        d = pi
    elif args.emit == "treedec":
        d = treedec_from_order(h, pi)
    elif args.emit == "branchdec":
        d = branchdec_from_order(h, pi)
    else:
        d = pseudo_tree_from_order(primal_graph(h), pi)
    Path(args.output).write_text(serialize_decomp(d))
    return 0


def cmd_width(args) -> int:
    expect = {"branch": "branch", "tree": "tree", "order": "order"}[args.kind]
    text = _read(args.decomp)
    if args.kind == "order" and not text.lstrip().startswith("{"):
        try:
            d = ElimOrder(tuple(int(t) for t in text.split()))
        except ValueError:
            raise ParseError("order file must list vertex ids") from None
    else:
        d = parse_decomp(text, expect)
    h = hypergraph_of(parse_dimacs(_read(args.cnf)))
    if isinstance(d, ElimOrder):
        problems = validate(d, h)
        if problems:
            raise InvalidDecomposition("; ".join(problems))
        print(induced_width(h, d)[0])
    else:
        print(width_of(d, h))
    return 0


def cmd_generate(args) -> int:
    if args.family == "pearls":
        f = gen_pearls(args.m, args.n)
    elif args.family == "blocks":
        f = gen_blocks(args.k)
    else:
        f = gen_random(args.n, args.m, args.k, args.seed)
    Path(args.output).write_text(serialize_dimacs(f))
    return 0


def cmd_sumprod(args) -> int:
    semiring = SEMIRINGS[args.semiring]
    inst = parse_factor_file(_read(args.factors), semiring)
    decomp = _load_decomp(args.decomp)
    value, _ = _run_instance_algo(args.algo, inst, decomp)
    text = format_value(value)
    print(f"s VALUE {text}" if "/" in text or text == "-inf" else f"s COUNT {text}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sumprod-dpll", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="model count or weighted probability of a DIMACS CNF")
    c.add_argument("cnf")
    c.add_argument("--algo", choices=COUNT_ALGOS, default="comp-cache")
    c.add_argument("--order", default="dynamic", help="dynamic | random:<seed> | static-file:<path>")
    c.add_argument("--decomp", help="decomposition document for the chosen algorithm")
    c.add_argument("--no-up", action="store_true", help="disable unit propagation")
    c.add_argument("--stats", help="write a JSON run report here")
    c.set_defaults(func=cmd_count)

    d = sub.add_parser("decompose", help="heuristic decomposition of a CNF's hypergraph")
    d.add_argument("cnf")
    d.add_argument("--method", choices=[h.value for h in Heuristic], required=True)
    d.add_argument("--seed", type=int)
    d.add_argument("--emit", choices=("order", "treedec", "branchdec", "pseudotree"), required=True)
    d.add_argument("-o", "--output", required=True)
    d.set_defaults(func=cmd_decompose)

    w = sub.add_parser("width", help="width of a decomposition document")
    w.add_argument("--kind", choices=("branch", "tree", "order"), required=True)
    w.add_argument("--decomp", required=True)
    w.add_argument("--cnf", required=True)
    w.set_defaults(func=cmd_width)

    g = sub.add_parser("generate", help="write a benchmark formula")
    gs = g.add_subparsers(dest="family", required=True)
    gp = gs.add_parser("pearls")
    gp.add_argument("--n", type=int, required=True)
    gp.add_argument("--m", type=int, required=True)
    gb = gs.add_parser("blocks")
    gb.add_argument("--k", type=int, required=True)
    gr = gs.add_parser("random")
    for name in ("--n", "--m", "--k", "--seed"):
        gr.add_argument(name, type=int, required=True)
    for sp in (gp, gb, gr):
        sp.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("sumprod", help="solve a factor-file instance")
    s.add_argument("factors")
    s.add_argument("--semiring", choices=sorted(SEMIRINGS), default="count")
    s.add_argument("--algo", choices=SUMPROD_ALGOS, default="dpll-cache")
    s.add_argument("--decomp")
    s.set_defaults(func=cmd_sumprod)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (UsageError, ParseError, TautologyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SumProdError, ValueError, RecursionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
