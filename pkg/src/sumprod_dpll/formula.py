"""CNF formulas, restriction, unit propagation and component splitting.

Values throughout are probabilities under the per-variable weights
(``Pr(x = 1)``, default 1/2), kept as exact :class:`fractions.Fraction`.
Integer model counts are recovered at the boundary with
:func:`probability_to_count`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .errors import FormulaError, NonIntegralCount, TautologyError

Clause = tuple  # tuple[int, ...], literals sorted by variable id
ClauseRef = tuple  # (original clause index, residual literals)

HALF = Fraction(1, 2)


def _normalize_clause(lits: Iterable[int], num_vars: int) -> Clause:
    lits = tuple(int(l) for l in lits)
    seen = {}
    for lit in lits:
        if lit == 0 or abs(lit) > num_vars:
            raise FormulaError(f"literal {lit} outside variable range 1..{num_vars}")
        var = abs(lit)
        if var in seen:
            if seen[var] != lit:
                raise TautologyError(f"clause {lits} contains both {var} and -{var}")
            raise FormulaError(f"clause {lits} repeats variable {var}")
        seen[var] = lit
    return tuple(sorted(lits, key=abs))


@dataclass(frozen=True, eq=True)
class Formula:
    """A clause multiset over variables ``1..num_vars``.

    ``weights`` maps a variable to ``Pr(var = 1)``; unlisted variables get 1/2.
    """

    num_vars: int
    clauses: tuple = ()
    weights: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        if self.num_vars < 0:
            raise FormulaError("num_vars must be non-negative")
        clauses = tuple(_normalize_clause(c, self.num_vars) for c in self.clauses)
        object.__setattr__(self, "clauses", clauses)
        weights = {}
        for var, p in dict(self.weights).items():
            var = int(var)
            p = Fraction(p)
            if not 1 <= var <= self.num_vars:
                raise FormulaError(f"weight for unknown variable {var}")
            if not 0 <= p <= 1:
                raise FormulaError(f"weight {p} for variable {var} outside [0, 1]")
            weights[var] = p
        object.__setattr__(self, "weights", weights)

    __hash__ = None

    def weight(self, var: int, value: int) -> Fraction:
        p = self.weights.get(var, HALF)
        return p if value else 1 - p

    @property
    def is_uniform(self) -> bool:
        return all(p == HALF for p in self.weights.values())

    def with_weights(self, weights: Mapping[int, Fraction]) -> "Formula":
        return Formula(self.num_vars, self.clauses, weights)

    def residual(self) -> "Component":
        """The whole formula as a residual clause set (not split)."""
        return Component(tuple(enumerate(self.clauses)))


@dataclass(frozen=True)
class Component:
    """A residual clause set tagged with original clause indices.

    Used both for whole residual formulas and for connected components of
    them. The cache key depends on the residual literals only, so the same
    sub-formula reached along different paths maps to the same key.
    """

    clause_refs: tuple

    def __post_init__(self):
        refs = tuple(sorted((int(i), tuple(lits)) for i, lits in self.clause_refs))
        object.__setattr__(self, "clause_refs", refs)

    @cached_property
    def vars(self) -> tuple:
        return tuple(sorted({abs(l) for _, lits in self.clause_refs for l in lits}))

    @cached_property
    def key(self) -> bytes:
        return canonical_key(self)

    @property
    def clauses(self) -> tuple:
        return tuple(lits for _, lits in self.clause_refs)

    def __len__(self):
        return len(self.clause_refs)


Residual = Union[Formula, Component]


class ObviousStatus(enum.Enum):
    EmptyFormula = "empty"
    HasEmptyClause = "empty-clause"
    NotObvious = "not-obvious"


class Status(enum.Enum):
    Ok = "ok"
    Conflict = "conflict"


class Assignment(dict):
    """Partial map var -> {0, 1}; rebinding a variable to a new value is an error."""

    def __setitem__(self, var, value):
        value = int(value)
        if value not in (0, 1):
            raise FormulaError(f"value {value} for variable {var} is not 0/1")
        old = self.get(var)
        if old is not None and old != value:
            raise FormulaError(f"variable {var} already assigned {old}")
        super().__setitem__(var, value)

    def update(self, *args, **kwargs):
        for k, v in dict(*args, **kwargs).items():
            self[k] = v

    def copy(self) -> "Assignment":
        return Assignment(self)


def _refs(f: Residual) -> tuple:
    if isinstance(f, Formula):
        return tuple(enumerate(f.clauses))
    return f.clause_refs


def reduce_refs(refs: Sequence[ClauseRef], a: Mapping[int, int]) -> tuple:
    out = []
    for idx, lits in refs:
        kept = []
        for lit in lits:
            val = a.get(abs(lit))
            if val is None:
                kept.append(lit)
            elif (lit > 0) == bool(val):
                break
        else:
            out.append((idx, tuple(kept) if len(kept) != len(lits) else lits))
    return tuple(out)


def reduce(f: Residual, a: Mapping[int, int]) -> Component:
    """Drop clauses satisfied by ``a`` and delete the literals it falsifies."""
    return Component(reduce_refs(_refs(f), a))


def is_obvious(f: Residual) -> ObviousStatus:
    refs = _refs(f)
    if not refs:
        return ObviousStatus.EmptyFormula
    if any(not lits for _, lits in refs):
        return ObviousStatus.HasEmptyClause
    return ObviousStatus.NotObvious


def propagate_refs(refs: Sequence[ClauseRef]):
    """Unit propagation on raw clause refs.

    Returns ``(refs, forced, conflict)``; ``forced`` lists ``(var, value)`` in
    the order they were implied.
    """
    forced = []
    refs = tuple(refs)
    while True:
        units = {}
        for _, lits in refs:
            if not lits:
                return refs, forced, True
            if len(lits) == 1:
                lit = lits[0]
                var, val = abs(lit), int(lit > 0)
                if units.get(var, val) != val:
                    return refs, forced, True
                units[var] = val
        if not units:
            return refs, forced, False
        forced.extend(units.items())
        refs = reduce_refs(refs, units)


def unit_propagate(f: Residual, a: Mapping[int, int] = None):
    """Extend ``a`` with every value forced by unit clauses of ``f|a``."""
    out = Assignment(a or {})
    refs, forced, conflict = propagate_refs(reduce_refs(_refs(f), out))
    for var, val in forced:
        out[var] = val
    return out, (Status.Conflict if conflict else Status.Ok)


def split_refs(refs: Sequence[ClauseRef]) -> list:
    """Partition clause refs by primal-graph connectivity.

    Groups come back ordered by their smallest variable; empty clauses form
    singleton groups placed first.
    """
    parent = {}

    def find(v):
        root = v
        while parent[root] != root:
            root = parent[root]
        while parent[v] != root:
            parent[v], v = root, parent[v]
        return root

    for _, lits in refs:
        for lit in lits:
            parent.setdefault(abs(lit), abs(lit))
        if len(lits) > 1:
            r0 = find(abs(lits[0]))
            for lit in lits[1:]:
                r = find(abs(lit))
                if r != r0:
                    if r < r0:
                        r0, r = r, r0
                    parent[r] = r0
    groups = {}
    empties = []
    for ref in refs:
        if ref[1]:
            groups.setdefault(find(abs(ref[1][0])), []).append(ref)
        else:
            empties.append([ref])
    # union always keeps the smaller id as root, so root == smallest var
    return empties + [groups[r] for r in sorted(groups)]


def to_components(f: Residual) -> list:
    return [Component(tuple(g)) for g in split_refs(_refs(f))]


def canonical_key(c: Residual) -> bytes:
    """Sorted residual clauses, each written as its literals followed by 0."""
    clauses = sorted(lits for _, lits in _refs(c))
    return " ".join(" ".join(map(str, lits + (0,))) for lits in clauses).encode()


def clauses_from_key(key: bytes) -> list:
    """Inverse of :func:`canonical_key` (clause lists only)."""
    clauses, cur = [], []
    for tok in key.split():
        lit = int(tok)
        if lit == 0:
            clauses.append(tuple(cur))
            cur = []
        else:
            cur.append(lit)
    return clauses


def probability_to_count(p, num_vars: int) -> int:
    value = Fraction(p) * (1 << num_vars)
    if value.denominator != 1:
        raise NonIntegralCount(f"{p} * 2^{num_vars} is not an integer")
    return value.numerator


def _satisfying_mask(f: Formula) -> np.ndarray:
    n = f.num_vars
    if n > 26:
        raise FormulaError("brute force limited to 26 variables")
    idx = np.arange(1 << n, dtype=np.int64)
    bits = [None] + [((idx >> (v - 1)) & 1).astype(bool) for v in range(1, n + 1)]
    sat = np.ones(1 << n, dtype=bool)
    for clause in f.clauses:
        csat = np.zeros(1 << n, dtype=bool)
        for lit in clause:
            csat |= bits[lit] if lit > 0 else ~bits[-lit]
        sat &= csat
    return sat


def brute_force_count(f: Formula) -> int:
    """Number of satisfying assignments over all ``num_vars`` variables."""
    return int(_satisfying_mask(f).sum())


def brute_force_probability(f: Formula) -> Fraction:
    """Weighted probability of ``f`` by full enumeration."""
    sat = _satisfying_mask(f)
    if f.is_uniform:
        return Fraction(int(sat.sum()), 1 << f.num_vars)
    idx = np.nonzero(sat)[0]
    numer = np.ones(len(idx), dtype=object)
    denom = 1
    for v in range(1, f.num_vars + 1):
        p = f.weights.get(v, HALF)
        bit = ((idx >> (v - 1)) & 1).astype(bool)
        numer = numer * np.where(bit, p.numerator, p.denominator - p.numerator).astype(object)
        denom *= p.denominator
    return Fraction(int(numer.sum()) if len(idx) else 0, denom)
