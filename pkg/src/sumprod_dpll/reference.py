"""Structure-guided SUMPROD solvers: variable elimination, recursive
conditioning and AND/OR search.

All three work on :class:`~sumprod_dpll.semiring.SemiringInstance`; CNF input
goes through :func:`~sumprod_dpll.semiring.encode_cnf_as_instance` first.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

from .decomposition import (BranchDecomp, PseudoTree, _check_order,
                            hypergraph_of, primal_graph, validate)
from .errors import FactorScopeViolation, InvalidDecomposition, InvalidPseudoTree
from .search import CacheStore, SearchStats
from .semiring import Factor, SemiringInstance, SemiringSpec


class Mode(enum.Enum):
    Space = "space"
    Cache = "cache"


def early_zero_cutoff(running, semiring: SemiringSpec) -> bool:
    """True when ``running`` is an annihilating zero, so the rest of a product can be skipped."""
    return semiring.zero_annihilates and semiring.is_zero(running)


def _scalar_part(inst: SemiringInstance):
    s = inst.semiring
    acc = s.one
    for f in inst.factors:
        if not f.scope:
            acc = s.mul(acc, f.table[0])
    return acc


def _instantiations(variables, domains):
    """Row-major assignments of ``variables``, last one fastest."""
    return itertools.product(*(range(domains[v]) for v in variables))


# --------------------------------------------------------------------------
# variable elimination

def _sum_out(factors, var, domains, s: SemiringSpec) -> Factor:
    scope = sorted({v for f in factors for v in f.scope} - {var})
    table = []
    for values in _instantiations(scope, domains):
        a = dict(zip(scope, values))
        acc = s.zero
        for d in range(domains[var]):
            a[var] = d
            acc = s.add(acc, s.prod(f.value(a) for f in factors))
        table.append(acc)
    return Factor(tuple(scope), tuple(domains[v] for v in scope), table)


def ve_solve(inst: SemiringInstance, pi) -> object:
    """Eliminate variables along ``pi``; each step replaces the factors that
    mention the variable by their product summed over its domain."""
    order = _check_order(inst.domains, pi)
    s = inst.semiring
    pool = list(inst.factors)
    for var in order:
        bucket = [f for f in pool if var in f.scope]
        pool = [f for f in pool if var not in f.scope]
        if bucket:
            pool.append(_sum_out(bucket, var, inst.domains, s))
        else:
            pool.append(Factor.scalar(s.sum(s.one for _ in range(inst.domains[var]))))
    return s.prod(f.table[0] for f in pool)


# --------------------------------------------------------------------------
# recursive conditioning

class _RC:
    def __init__(self, inst: SemiringInstance, b: BranchDecomp, mode: Mode, cache: CacheStore):
        self.inst = inst
        self.s = inst.semiring
        self.b = b
        self.mode = Mode(mode)
        self.cache = cache
        self.stats = SearchStats()
        h = hypergraph_of(inst)
        problems = validate(b, h)
        if problems:
            raise InvalidDecomposition("; ".join(problems))
        self.leaf_factor = {}
        scoped = [f for f in inst.factors if f.scope]
        for leaf in b.leaves():
            self.leaf_factor[leaf.id] = scoped[leaf.edge]
        # per internal node: sorted label and the variables both children share
        self.context = {}
        for n in b.nodes:
            if not n.is_leaf:
                left, right = n.children
                shared = sorted(b.label(left) & b.label(right))
                self.context[n.id] = (n.children, sorted(n.label), shared)

    def leaf_value(self, node_id, rho):
        f = self.leaf_factor[node_id]
        free = [v for v in f.scope if v not in rho]
        a = dict(rho)
        acc = self.s.zero
        for values in _instantiations(free, self.inst.domains):
            a.update(zip(free, values))
            acc = self.s.add(acc, f.value(a))
        return acc

    def solve(self, node_id, rho):
        self.stats.decisions += 1
        if node_id in self.leaf_factor:
            return self.leaf_value(node_id, rho)
        (left, right), label, shared = self.context[node_id]
        key = None
        if self.mode is Mode.Cache:
            key = (node_id, tuple((v, rho[v]) for v in label if v in rho))
            hit = self.cache.lookup(key)
            if hit is not CacheStore.MISSING:
                return hit
        s = self.s
        xs = [v for v in shared if v not in rho]
        p = s.zero
        for values in _instantiations(xs, self.inst.domains):
            sub = dict(rho)
            sub.update(zip(xs, values))
            lv = self.solve(left, sub)
            if early_zero_cutoff(lv, s):
                continue
            p = s.add(p, s.mul(lv, self.solve(right, sub)))
        if key is not None:
            self.cache.store(key, p)
        return p


def rc_solve(inst: SemiringInstance, b: BranchDecomp, mode: Mode = Mode.Cache, cache: CacheStore = None):
    """Recursive conditioning over a branch decomposition of ``hypergraph_of(inst)``.

    Leaf ``i`` carries the i-th factor with a non-empty scope. Scalar factors
    and variables in no factor are folded in at the top.
    """
    s = inst.semiring
    base = _scalar_part(inst)
    for v in inst.unconstrained():
        base = s.mul(base, inst.free_factor(v))
    cache = cache if cache is not None else CacheStore()
    if not any(f.scope for f in inst.factors):
        stats = SearchStats(value=base)
        return base, stats
    run = _RC(inst, b, mode, cache)
    value = base if early_zero_cutoff(base, s) else s.mul(base, run.solve(b.root, {}))
    run.stats.absorb_cache(cache)
    run.stats.value = value
    return value, run.stats


def rc_node_value(inst: SemiringInstance, b: BranchDecomp, node_id: int, rho: dict):
    """Value of the subproblem below ``node_id`` under ``rho``, solved without a cache."""
    return _RC(inst, b, Mode.Space, CacheStore()).solve(node_id, dict(rho))


# --------------------------------------------------------------------------
# AND/OR search

@dataclass
class AOLabels:
    label: dict  # node -> frozenset of ancestors that affect its subtree
    fns: dict  # node -> tuple of factor indices fully instantiated at that node


def compute_ao_labels(inst: SemiringInstance, t: PseudoTree) -> AOLabels:
    anc = {v: t.ancestors(v) for v in t.parent}
    for i, f in enumerate(inst.factors):
        if not set(f.scope) <= anc.keys():
            raise FactorScopeViolation(f"factor {i} mentions variables outside the pseudo tree")
    label = {v: set() for v in t.parent}
    fns = {v: [] for v in t.parent}
    for i, f in enumerate(inst.factors):
        if not f.scope:
            continue
        scope = set(f.scope)
        deepest = [n for n in f.scope if scope - {n} <= set(anc.get(n, ()))]
        if not deepest:
            raise FactorScopeViolation(f"factor {i} scope {f.scope} does not lie on one root path")
        n = deepest[0]
        fns[n].append(i)
        top = min(scope, key=lambda v: len(anc[v]))
        u = n
        while u != top:
            label[u] |= scope & set(anc[u])
            u = t.parent[u]
    return AOLabels({v: frozenset(s) for v, s in label.items()},
                    {v: tuple(ix) for v, ix in fns.items()})


class _AO:
    def __init__(self, inst: SemiringInstance, t: PseudoTree, mode: Mode, cache: CacheStore):
        problems = validate(t, primal_graph(hypergraph_of(inst)))
        if problems:
            raise InvalidPseudoTree("; ".join(problems))
        self.inst = inst
        self.s = inst.semiring
        self.t = t
        self.children = t.children()
        self.labels = compute_ao_labels(inst, t)
        self.mode = Mode(mode)
        self.cache = cache
        self.stats = SearchStats()

    def solve(self, r, rho):
        self.stats.decisions += 1
        s = self.s
        key = None
        if self.mode is Mode.Cache:
            key = (r, tuple((v, rho[v]) for v in sorted(self.labels.label[r])))
            hit = self.cache.lookup(key)
            if hit is not CacheStore.MISSING:
                return hit
        p = s.zero
        for d in range(self.inst.domains[r]):
            rho[r] = d
            alpha = s.prod(self.inst.factors[i].value(rho) for i in self.labels.fns[r])
            if not early_zero_cutoff(alpha, s):
                for c in self.children[r]:
                    alpha = s.mul(alpha, self.solve(c, rho))
                    if early_zero_cutoff(alpha, s):
                        break
                p = s.add(p, alpha)
            del rho[r]
        if key is not None:
            self.cache.store(key, p)
        return p


def ao_solve(inst: SemiringInstance, t: PseudoTree, mode: Mode = Mode.Cache, cache: CacheStore = None):
    """AND/OR search guided by a pseudo tree (a forest is fine) over all of
    ``inst``'s variables."""
    cache = cache if cache is not None else CacheStore()
    run = _AO(inst, t, mode, cache)
    s = inst.semiring
    value = _scalar_part(inst)
    for r in t.roots:
        if early_zero_cutoff(value, s):
            break
        value = s.mul(value, run.solve(r, {}))
    run.stats.absorb_cache(cache)
    run.stats.value = value
    return value, run.stats


def ao_node_value(inst: SemiringInstance, t: PseudoTree, node: int, rho: dict):
    """Value of the subtree rooted at ``node`` under ``rho``, solved without a cache."""
    return _AO(inst, t, Mode.Space, CacheStore()).solve(node, dict(rho))
