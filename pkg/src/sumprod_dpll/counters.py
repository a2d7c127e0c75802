"""DPLL-style satisfiability and model counting.

Every counter returns the probability of the formula under its variable
weights; with uniform weights multiply by ``2**n`` (see
:func:`~sumprod_dpll.formula.probability_to_count`) to get the model count.
Branching always tries value 0 first.
"""

from __future__ import annotations

import sys
from fractions import Fraction
from typing import Iterable, Optional

from .formula import Component, Formula, propagate_refs, reduce_refs, split_refs
from .search import CacheStore, Chooser, OrderKind, OrderPolicy, SearchStats

ZERO = Fraction(0)
ONE = Fraction(1)

sys.setrecursionlimit(max(sys.getrecursionlimit(), 10000))


def _occurrences(refs, into: Optional[dict] = None) -> dict:
    occ = {} if into is None else into
    for _, lits in refs:
        for lit in lits:
            v = abs(lit)
            occ[v] = occ.get(v, 0) + 1
    return occ


def choose_variable(components: Iterable[Component], policy: OrderPolicy, chooser: Chooser = None):
    """Pick a branching variable from ``components`` and the component holding it."""
    chooser = chooser or Chooser(policy)
    occ, owner = {}, {}
    for comp in components:
        for _, lits in comp.clause_refs:
            for lit in lits:
                v = abs(lit)
                occ[v] = occ.get(v, 0) + 1
                owner[v] = comp
    var = chooser.pick(occ)
    return var, owner[var]


class _Run:
    """Shared state for one solver run: the formula, policy, chooser and stats."""

    def __init__(self, f: Formula, policy: OrderPolicy):
        policy = policy or OrderPolicy.dynamic()
        if policy.kind is OrderKind.StaticList:
            policy.check(range(1, f.num_vars + 1))
        self.f = f
        self.policy = policy
        self.chooser = Chooser(policy)
        self.stats = SearchStats()

    def simplify(self, refs):
        """Unit-propagate if enabled.

        Returns ``(refs, weight, conflict)`` where ``weight`` is the product of
        the weights of forced values.
        """
        if not self.policy.unit_propagation:
            conflict = any(not lits for _, lits in refs)
            if conflict:
                self.stats.conflicts += 1
            return refs, ONE, conflict
        refs, forced, conflict = propagate_refs(refs)
        self.stats.up_propagations += len(forced)
        if conflict:
            self.stats.conflicts += 1
            return refs, ZERO, True
        w = ONE
        for var, val in forced:
            w *= self.f.weight(var, val)
        return refs, w, False

    def pick(self, refs):
        self.stats.decisions += 1
        return self.chooser.pick(_occurrences(refs))

    def finish(self, value, cache: CacheStore = None):
        if cache is not None:
            self.stats.absorb_cache(cache)
        self.stats.value = value
        return value, self.stats


def sat_dpll(f: Formula, policy: OrderPolicy = None):
    """Plain DPLL; stops at the first satisfying path."""
    run = _Run(f, policy)

    def dpll(refs):
        refs, _, conflict = run.simplify(refs)
        if conflict:
            return False
        if not refs:
            return True
        x = run.pick(refs)
        return dpll(reduce_refs(refs, {x: 0})) or dpll(reduce_refs(refs, {x: 1}))

    sat = dpll(tuple(enumerate(f.clauses)))
    run.stats.value = ONE if sat else ZERO
    return sat, run.stats


def count_dpll(f: Formula, policy: OrderPolicy = None):
    """#DPLL: weighted sum over both branches, no caching."""
    run = _Run(f, policy)

    def count(refs):
        refs, w, conflict = run.simplify(refs)
        if conflict:
            return ZERO
        if not refs:
            return w
        x = run.pick(refs)
        lo = count(reduce_refs(refs, {x: 0}))
        hi = count(reduce_refs(refs, {x: 1}))
        return w * (f.weight(x, 0) * lo + f.weight(x, 1) * hi)

    return run.finish(count(tuple(enumerate(f.clauses))))


def count_simple_cache(f: Formula, policy: OrderPolicy = None, cache: CacheStore = None):
    """#DPLL memoising whole residual formulas by canonical key."""
    run = _Run(f, policy)
    cache = cache if cache is not None else CacheStore()

    def count(refs):
        refs, w, conflict = run.simplify(refs)
        if conflict:
            return ZERO
        if not refs:
            return w
        key = Component(refs).key
        val = cache.lookup(key)
        if val is CacheStore.MISSING:
            x = run.pick(refs)
            lo = count(reduce_refs(refs, {x: 0}))
            hi = count(reduce_refs(refs, {x: 1}))
            val = f.weight(x, 0) * lo + f.weight(x, 1) * hi
            cache.store(key, val)
        return w * val

    return run.finish(count(tuple(enumerate(f.clauses))), cache)


def initial_components(f: Formula, unit_propagation: bool = True):
    """The top-level components a component-caching run starts from.

    Returns ``(weight, components)``; ``weight`` is zero on an immediate
    conflict, in which case no components are returned.
    """
    refs = tuple(enumerate(f.clauses))
    w = ONE
    if unit_propagation:
        refs, forced, conflict = propagate_refs(refs)
        if conflict:
            return ZERO, []
        for var, val in forced:
            w *= f.weight(var, val)
    elif any(not lits for _, lits in refs):
        return ZERO, []
    return w, [Component(tuple(g)) for g in split_refs(refs)]


class _ComponentSearch:
    def __init__(self, run: _Run, cache: CacheStore, space_mode: bool):
        self.run = run
        self.f = run.f
        self.cache = cache
        self.space_mode = space_mode

    def branch(self, comp: Component, x: int, val: int):
        """Reduce ``comp`` by ``x = val``; returns ``(weight, subcomponents)``."""
        refs, w, conflict = self.run.simplify(reduce_refs(comp.clause_refs, {x: val}))
        if conflict:
            return ZERO, []
        comps = [Component(tuple(g)) for g in split_refs(refs)]
        self.run.stats.components_created += len(comps)
        return w * self.f.weight(x, val), comps

    def value_of(self, comps):
        """Product of known values; MISSING unless every member is known or one is zero."""
        total = ONE
        missing = False
        for c in comps:
            v = self.cache.peek(c.key)
            if v is CacheStore.MISSING:
                missing = True
            elif v == 0:
                return ZERO
            else:
                total *= v
        return CacheStore.MISSING if missing else total

    def solve(self, comps):
        unknown = []
        total = ONE
        for c in comps:
            v = self.cache.lookup(c.key)
            if v is CacheStore.MISSING:
                unknown.append(c)
            elif v == 0:
                return ZERO
            else:
                total *= v
        if not unknown:
            return total
        self.run.stats.decisions += 1
        x, phi = choose_variable(unknown, self.run.policy, self.run.chooser)
        rest = [c for c in unknown if c is not phi]
        p = ZERO
        created = []
        complete = True
        for val in (0, 1):
            w, sub = self.branch(phi, x, val)
            if w == 0:
                continue
            created.extend(sub)
            self.solve(rest + sub)
            sv = self.value_of(sub)
            if sv is CacheStore.MISSING:
                # a member of ``rest`` is known zero, so the whole set is zero
                complete = False
                break
            p += w * sv
        if complete:
            self.cache.store(phi.key, p)
        if self.space_mode:
            for c in created:
                self.cache.remove(c.key)
        if not complete:
            return ZERO
        return self.value_of(comps)


def count_component_cache(f: Formula, policy: OrderPolicy = None, space_mode: bool = False,
                          cache: CacheStore = None):
    """#DPLL-Cache, or #DPLL-Space when ``space_mode`` is set.

    Works on a set of disjoint components; a solved component is stored under
    its canonical key. In space mode the sub-components created while solving a
    component are dropped once that component's value is known.
    """
    run = _Run(f, policy)
    cache = cache if cache is not None else CacheStore()
    refs, w, conflict = run.simplify(tuple(enumerate(f.clauses)))
    if conflict:
        return run.finish(ZERO, cache)
    comps = [Component(tuple(g)) for g in split_refs(refs)]
    run.stats.components_created += len(comps)
    search = _ComponentSearch(run, cache, space_mode)
    value = search.solve(comps)
    if value is CacheStore.MISSING:  # pragma: no cover - solve always resolves its input
        raise AssertionError("component search left the top-level set unresolved")
    return run.finish(w * value, cache)


def count_component_space(f: Formula, policy: OrderPolicy = None, cache: CacheStore = None):
    return count_component_cache(f, policy, space_mode=True, cache=cache)
