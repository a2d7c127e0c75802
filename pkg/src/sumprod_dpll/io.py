"""Text formats: DIMACS CNF, factor files, decomposition documents, run reports."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .decomposition import BranchDecomp, ElimOrder, PseudoTree, TreeDecomp, TreeNode
from .errors import (FormulaError, HeaderMismatch, KindMismatch, ParseError, ScopeOutOfRange,
                     TableLengthMismatch, TautologyError)
from .formula import Formula
from .search import SearchStats
from .semiring import COUNTING, NEG_INF, Factor, SemiringInstance, SemiringSpec

# --------------------------------------------------------------------------
# DIMACS

_WEIGHT = re.compile(r"^c\s+w\s+(\d+)\s+(\S+)\s*$")


def _fraction(tok: str, line: int) -> Fraction:
    try:
        return Fraction(tok)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"bad number {tok!r}", line) from None


def parse_dimacs(text: str) -> Formula:
    """Parse DIMACS CNF. ``c w <var> <p>/<q>`` comment lines set ``Pr(var = 1)``."""
    header = None
    weights = {}
    clauses, cur = [], []
    clause_lines = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            m = _WEIGHT.match(line)
            if m:
                weights[int(m.group(1))] = (_fraction(m.group(2), lineno), lineno)
            continue
        if line.startswith("%"):
            break
        if line.startswith("p"):
            parts = line.split()
            if header is not None:
                raise ParseError("second problem line", lineno)
            if len(parts) != 4 or parts[1] != "cnf":
                raise ParseError("expected 'p cnf <vars> <clauses>'", lineno)
            try:
                header = (int(parts[2]), int(parts[3]))
            except ValueError:
                raise ParseError("header counts must be integers", lineno) from None
            if header[0] < 0 or header[1] < 0:
                raise ParseError("header counts must be non-negative", lineno)
            continue
        if header is None:
            raise ParseError("clause before problem line", lineno)
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise ParseError(f"bad literal {tok!r}", lineno) from None
            if abs(lit) > header[0]:
                raise ParseError(f"literal {lit} exceeds declared {header[0]} variables", lineno)
            if lit == 0:
                clauses.append(tuple(cur))
                clause_lines.append(lineno)
                cur = []
            else:
                cur.append(lit)
    if header is None:
        raise ParseError("missing problem line")
    if cur:
        raise ParseError("last clause is not terminated by 0")
    if len(clauses) != header[1]:
        raise HeaderMismatch(f"header declares {header[1]} clauses, found {len(clauses)}")
    for c, lineno in zip(clauses, clause_lines):
        if len({abs(l) for l in c}) != len(c):
            if any(-l in c for l in c):
                raise TautologyError(f"line {lineno}: clause {c} contains a literal and its negation")
            raise ParseError(f"clause {c} repeats a literal", lineno)
    for var, (p, lineno) in weights.items():
        if not 1 <= var <= header[0] or not 0 <= p <= 1:
            raise ParseError(f"weight {p} for variable {var} out of range", lineno)
    try:
        return Formula(header[0], tuple(clauses), {v: p for v, (p, _) in weights.items()})
    except FormulaError as exc:
        if isinstance(exc, TautologyError):
            raise
        raise ParseError(str(exc)) from None


def serialize_dimacs(f: Formula) -> str:
    lines = [f"c w {v} {p.numerator}/{p.denominator}" for v, p in sorted(f.weights.items())]
    lines.append(f"p cnf {f.num_vars} {len(f.clauses)}")
    lines += [" ".join(map(str, c + (0,))) for c in f.clauses]
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# factor files

def _entry(tok: str, lineno: int):
    if tok in ("-inf", "-Infinity"):
        return NEG_INF
    return _fraction(tok, lineno)


def parse_factor_file(text: str, semiring: SemiringSpec = COUNTING) -> SemiringInstance:
    """Read the ``sumprod`` factor format (variables numbered from 1).

    Layout: ``sumprod <numvars>``, a line of domain sizes, ``<numfactors>``,
    then per factor a scope line ``<k> <var ids...>`` and a table line in
    row-major order with the last scope variable fastest. Lines starting with
    ``c`` are comments.
    """
    lines = [(i, l.split()) for i, l in enumerate(text.splitlines(), 1)
             if l.strip() and not l.lstrip().startswith("c")]
    it = iter(lines)

    def take(what):
        try:
            return next(it)
        except StopIteration:
            raise ParseError(f"unexpected end of file, expected {what}") from None

    lineno, head = take("header")
    if len(head) != 2 or head[0] != "sumprod" or not head[1].isdigit():
        raise ParseError("expected 'sumprod <numvars>'", lineno)
    n = int(head[1])
    lineno, sizes = take("domain sizes")
    if len(sizes) != n or not all(s.isdigit() and int(s) >= 1 for s in sizes):
        raise HeaderMismatch(f"expected {n} positive domain sizes", lineno)
    domains = {v: int(s) for v, s in enumerate(sizes, 1)}
    lineno, cnt = take("factor count")
    if len(cnt) != 1 or not cnt[0].isdigit():
        raise ParseError("expected the number of factors", lineno)
    factors = []
    for _ in range(int(cnt[0])):
        lineno, sc = take("factor scope")
        try:
            k, scope = int(sc[0]), [int(t) for t in sc[1:]]
        except (ValueError, IndexError):
            raise ParseError("bad scope line", lineno) from None
        if k != len(scope):
            raise ParseError(f"scope declares {k} variables, lists {len(scope)}", lineno)
        for v in scope:
            if v not in domains:
                raise ScopeOutOfRange(f"variable {v} outside 1..{n}", lineno)
        if len(set(scope)) != len(scope):
            raise ParseError("scope repeats a variable", lineno)
        tlineno, tab = take("factor table")
        need = 1
        for v in scope:
            need *= domains[v]
        if len(tab) != need:
            raise TableLengthMismatch(f"table has {len(tab)} entries, scope needs {need}", tlineno)
        table = [semiring.lift(_entry(t, tlineno)) for t in tab]
        factors.append(Factor(tuple(scope), tuple(domains[v] for v in scope), table))
    extra = next(it, None)
    if extra is not None:
        raise ParseError("trailing content after the last factor", extra[0])
    return SemiringInstance(domains, factors, semiring)


def _fmt_entry(x) -> str:
    if x == NEG_INF:
        return "-inf"
    if isinstance(x, bool):
        return str(int(x))
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def serialize_factor_file(inst: SemiringInstance) -> str:
    variables = list(inst.domains)
    if variables != list(range(1, len(variables) + 1)):
        raise ValueError("factor files need variables numbered 1..n")
    lines = [f"sumprod {len(variables)}", " ".join(str(inst.domains[v]) for v in variables),
             str(len(inst.factors))]
    for f in inst.factors:
        lines.append(" ".join(map(str, (len(f.scope),) + f.scope)))
        lines.append(" ".join(_fmt_entry(x) for x in f.table))
    return "\n".join(lines) + "\n"


# --------------------------------------------------------------------------
# decomposition documents

KINDS = {"order": ElimOrder, "tree": TreeDecomp, "branch": BranchDecomp, "pseudotree": PseudoTree}


def _kind_of(d) -> str:
    for name, cls in KINDS.items():
        if type(d) is cls:
            return name
    raise TypeError(f"cannot serialize {type(d).__name__}")


def serialize_decomp(d) -> str:
    kind = _kind_of(d)
    doc = {"kind": kind}
    if kind == "order":
        doc["order"] = list(d.order)
    elif kind == "pseudotree":
        doc["parent"] = {str(v): p for v, p in sorted(d.parent.items())}
    else:
        doc["root"] = d.root
        nodes = []
        for n in sorted(d.nodes, key=lambda n: n.id):
            node = {"id": n.id, "label": sorted(n.label), "children": list(n.children)}
            if n.edge is not None:
                node["edge"] = n.edge
            nodes.append(node)
        doc["nodes"] = nodes
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def parse_decomp(text: str, expect: Optional[str] = None):
    """Parse a decomposition document; ``expect`` names the required kind."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not a decomposition document: {exc.msg}", exc.lineno) from None
    if not isinstance(doc, dict) or doc.get("kind") not in KINDS:
        raise ParseError(f"unknown decomposition kind {doc.get('kind') if isinstance(doc, dict) else None!r}")
    kind = doc["kind"]
    if expect is not None and kind != expect:
        raise KindMismatch(f"expected a {expect} document, got {kind}")
    try:
        if kind == "order":
            return ElimOrder(tuple(int(v) for v in doc["order"]))
        if kind == "pseudotree":
            return PseudoTree({int(v): (None if p is None else int(p)) for v, p in doc["parent"].items()})
        nodes = tuple(TreeNode(int(n["id"]), tuple(int(c) for c in n.get("children", ())),
                               frozenset(int(v) for v in n.get("label", ())),
                               None if n.get("edge") is None else int(n["edge"]))
                      for n in doc["nodes"])
        return KINDS[kind](nodes, int(doc["root"]))
    except (KeyError, TypeError, ValueError, AttributeError) as exc:
        raise ParseError(f"malformed {kind} document: {exc}") from None


# --------------------------------------------------------------------------
# run reports

STATS_FIELDS = ("instance", "algo", "policy", "value", "decisions", "up_propagations",
                "cache_hits", "cache_stores", "cache_peak", "components_created",
                "conflicts", "wall_ms")


def format_value(value) -> str:
    """Integers print in decimal, other rationals as ``p/q``."""
    if isinstance(value, bool):
        return str(int(value))
    if value == NEG_INF:
        return "-inf"
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


@dataclass
class RunReport:
    instance: str
    algo: str
    policy: str
    value: str
    stats: SearchStats = field(default_factory=SearchStats)
    wall_ms: float = 0.0

    def to_dict(self) -> dict:
        d = {"instance": self.instance, "algo": self.algo, "policy": self.policy,
             "value": self.value}
        d.update(self.stats.counters())
        d["wall_ms"] = self.wall_ms
        return {k: d[k] for k in STATS_FIELDS}


def emit_stats(report: RunReport, path) -> None:
    Path(path).write_text(json.dumps(report.to_dict()) + "\n")
