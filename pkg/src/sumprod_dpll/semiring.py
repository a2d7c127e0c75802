"""Generic sum-of-products over a commutative semiring.

An instance is a set of finite-domain variables, a list of factor tables and
a :class:`SemiringSpec` giving (⊕, ⊗). Model counting, SAT, partition
functions, MPE and max-sum optimisation are all instances.
"""

from __future__ import annotations

import itertools
import math
import operator
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional, Sequence

from .errors import InstanceTooLarge, UnsupportedSemiring, VarNotInScope
from .search import CacheStore, Chooser, OrderPolicy, SearchStats

NEG_INF = float("-inf")


@dataclass(frozen=True)
class SemiringSpec:
    name: str
    add: Callable
    mul: Callable
    zero: object
    one: object
    zero_annihilates: bool = True
    lift: Callable = Fraction  # maps an exact rational table entry into the value set
    sample: Optional[Callable] = field(default=None, compare=False)
    encodes_cnf: bool = True

    def is_zero(self, value) -> bool:
        return value == self.zero

    def sum(self, values):
        acc = self.zero
        for v in values:
            acc = self.add(acc, v)
        return acc

    def prod(self, values):
        acc = self.one
        for v in values:
            acc = self.mul(acc, v)
        return acc


def _rand_fraction(rng: random.Random, lo=-12, hi=12):
    return Fraction(rng.randint(lo, hi), rng.randint(1, 6))


def _rand_maxsum(rng: random.Random):
    return NEG_INF if rng.random() < 0.15 else _rand_fraction(rng)


COUNTING = SemiringSpec("count", operator.add, operator.mul, Fraction(0), Fraction(1),
                        sample=_rand_fraction)
BOOLEAN = SemiringSpec("bool", operator.or_, operator.and_, False, True,
                       lift=lambda x: bool(x), sample=lambda rng: rng.random() < 0.5)
MAX_PRODUCT = SemiringSpec("max-product", max, operator.mul, Fraction(0), Fraction(1),
                           sample=lambda rng: _rand_fraction(rng, 0, 12))
MAX_SUM = SemiringSpec("max-sum", max, operator.add, NEG_INF, Fraction(0),
                       lift=lambda x: x if x == NEG_INF else Fraction(x),
                       sample=_rand_maxsum, encodes_cnf=False)
# the partition function uses the same (+, ×) structure as counting
SUM_PRODUCT = COUNTING

SEMIRINGS = {s.name: s for s in (COUNTING, BOOLEAN, MAX_PRODUCT, MAX_SUM)}


def verify_laws(spec: SemiringSpec, samples: int = 1000, seed: int = 0) -> list:
    """Check the commutative-semiring laws on random triples.

    Returns the list of violated laws (with a witness); empty means all hold.
    """
    rng = random.Random(seed)
    add, mul, zero, one = spec.add, spec.mul, spec.zero, spec.one
    failures = []
    for _ in range(samples):
        a, b, c = spec.sample(rng), spec.sample(rng), spec.sample(rng)
        checks = {
            "add commutative": add(a, b) == add(b, a),
            "mul commutative": mul(a, b) == mul(b, a),
            "add associative": add(add(a, b), c) == add(a, add(b, c)),
            "mul associative": mul(mul(a, b), c) == mul(a, mul(b, c)),
            "distributive": mul(a, add(b, c)) == add(mul(a, b), mul(a, c)),
            "add identity": add(a, zero) == a,
            "mul identity": mul(a, one) == a,
        }
        if spec.zero_annihilates:
            checks["annihilation"] = mul(a, zero) == zero
        for law, ok in checks.items():
            if not ok:
                failures.append(f"{spec.name}: {law} fails on {(a, b, c)}")
    return failures


@dataclass(frozen=True)
class Factor:
    """A table over ``scope``, row-major with the last scope variable fastest."""

    scope: tuple
    sizes: tuple
    table: tuple

    def __post_init__(self):
        scope = tuple(int(v) for v in self.scope)
        sizes = tuple(int(s) for s in self.sizes)
        object.__setattr__(self, "scope", scope)
        object.__setattr__(self, "sizes", sizes)
        object.__setattr__(self, "table", tuple(self.table))
        if len(set(scope)) != len(scope):
            raise ValueError(f"scope {scope} repeats a variable")
        if len(sizes) != len(scope):
            raise ValueError("one domain size per scope variable required")
        if len(self.table) != math.prod(sizes):
            raise ValueError(f"table has {len(self.table)} entries, scope needs {math.prod(sizes)}")

    @classmethod
    def scalar(cls, value) -> "Factor":
        return cls((), (), (value,))

    def index(self, assignment: Mapping[int, int]) -> int:
        idx = 0
        for var, size in zip(self.scope, self.sizes):
            idx = idx * size + assignment[var]
        return idx

    def value(self, assignment: Mapping[int, int]):
        return self.table[self.index(assignment)]

    def rows(self):
        """Yield ``(values tuple, entry)`` in table order."""
        return zip(itertools.product(*(range(s) for s in self.sizes)), self.table)


def reduce_factor(f: Factor, var: int, val: int) -> Factor:
    """Fix ``var = val`` and drop it from the scope."""
    if var not in f.scope:
        raise VarNotInScope(var)
    pos = f.scope.index(var)
    if not 0 <= val < f.sizes[pos]:
        raise ValueError(f"value {val} outside domain of variable {var}")
    stride = math.prod(f.sizes[pos + 1:])
    block = f.sizes[pos] * stride
    table = [f.table[base + val * stride + off]
             for base in range(0, len(f.table), block) for off in range(stride)]
    return Factor(f.scope[:pos] + f.scope[pos + 1:], f.sizes[:pos] + f.sizes[pos + 1:], table)


@dataclass(frozen=True)
class SemiringInstance:
    """Variables (``domains``: var -> size), factors and the semiring."""

    domains: Mapping[int, int]
    factors: tuple
    semiring: SemiringSpec = COUNTING

    def __post_init__(self):
        domains = {int(v): int(s) for v, s in sorted(dict(self.domains).items())}
        object.__setattr__(self, "domains", domains)
        object.__setattr__(self, "factors", tuple(self.factors))
        for v, s in domains.items():
            if s < 1:
                raise ValueError(f"variable {v} has empty domain")
        for i, f in enumerate(self.factors):
            for var, size in zip(f.scope, f.sizes):
                if domains.get(var) != size:
                    raise ValueError(f"factor {i} disagrees with domain of variable {var}")

    __hash__ = None

    @property
    def variables(self) -> list:
        return list(self.domains)

    def with_semiring(self, semiring: SemiringSpec) -> "SemiringInstance":
        return SemiringInstance(self.domains, self.factors, semiring)

    def unconstrained(self) -> list:
        used = {v for f in self.factors for v in f.scope}
        return [v for v in self.domains if v not in used]

    def free_factor(self, var):
        """⊕ over the domain of ``var`` of the unit: what a factor-free variable contributes."""
        s = self.semiring
        return s.sum(s.one for _ in range(self.domains[var]))


def reduce_instance(inst: SemiringInstance, assignment: Mapping[int, int]) -> SemiringInstance:
    factors = []
    for f in inst.factors:
        for var in f.scope:
            if var in assignment:
                f = reduce_factor(f, var, assignment[var])
        factors.append(f)
    domains = {v: s for v, s in inst.domains.items() if v not in assignment}
    return SemiringInstance(domains, factors, inst.semiring)


def brute_force_sumprod(inst: SemiringInstance, cap: int = 1 << 22):
    """Literal nested ⊕ over every variable of the ⊗ of all factors."""
    space = math.prod(inst.domains.values())
    if space > cap:
        raise InstanceTooLarge(f"{space} assignments exceeds cap {cap}")
    s = inst.semiring
    variables = list(inst.domains)
    total = s.zero
    for values in itertools.product(*(range(inst.domains[v]) for v in variables)):
        a = dict(zip(variables, values))
        prod = s.one
        for f in inst.factors:
            prod = s.mul(prod, f.value(a))
        total = s.add(total, prod)
    return total


def _factor_groups(factors: Sequence[Factor], idxs: Sequence[int], instantiated=()) -> list:
    """Group factor indices by connectivity over uninstantiated scope variables.

    Groups come back ordered by smallest variable.
    """
    parent = {}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    live = {}
    for i in idxs:
        vs = [v for v in factors[i].scope if v not in instantiated]
        live[i] = vs
        for v in vs:
            parent.setdefault(v, v)
        for v in vs[1:]:
            a, b = find(vs[0]), find(v)
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups = {}
    for i in idxs:
        if live[i]:
            groups.setdefault(find(live[i][0]), []).append(i)
    return [groups[r] for r in sorted(groups)]


def instance_to_components(inst: SemiringInstance):
    """Split a (reduced) instance into independent sub-instances.

    Returns ``(scalar, components)``: scalar factors and factor-free
    variables are folded into ``scalar``, so the instance value is
    ``scalar ⊗ ∏ value(component)``.
    """
    s = inst.semiring
    scalar = s.one
    for f in inst.factors:
        if not f.scope:
            scalar = s.mul(scalar, f.table[0])
    for v in inst.unconstrained():
        scalar = s.mul(scalar, inst.free_factor(v))
    comps = []
    for group in _factor_groups(inst.factors, range(len(inst.factors))):
        fs = [inst.factors[i] for i in group]
        vs = sorted({v for f in fs for v in f.scope})
        comps.append(SemiringInstance({v: inst.domains[v] for v in vs}, fs, s))
    return scalar, comps


def encode_cnf_as_instance(f, semiring: SemiringSpec = COUNTING) -> SemiringInstance:
    """Clauses become 0/1 tables; each weighted variable gets a unary
    factor ``[Pr(x=0), Pr(x=1)]``."""
    if not semiring.encodes_cnf:
        raise UnsupportedSemiring(f"CNF encoding is not defined for {semiring.name}")
    zero, one = semiring.lift(0), semiring.lift(1)
    factors = []
    for clause in f.clauses:
        if not clause:
            factors.append(Factor.scalar(zero))
            continue
        scope = tuple(abs(l) for l in clause)
        falsifying = tuple(0 if l > 0 else 1 for l in clause)
        table = [zero if row == falsifying else one
                 for row in itertools.product((0, 1), repeat=len(scope))]
        factors.append(Factor(scope, (2,) * len(scope), table))
    for var in sorted(f.weights):
        p = f.weights[var]
        factors.append(Factor((var,), (2,), (semiring.lift(1 - p), semiring.lift(p))))
    return SemiringInstance({v: 2 for v in range(1, f.num_vars + 1)}, factors, semiring)


def _make_instance(factors, evidence, semiring, domains=None) -> SemiringInstance:
    doms = dict(domains or {})
    for fac in factors:
        for v, s in zip(fac.scope, fac.sizes):
            doms.setdefault(v, s)
    inst = SemiringInstance(doms, factors, semiring)
    return reduce_instance(inst, dict(evidence or {}))


def make_instance_mpe(factors, evidence=None, domains=None) -> SemiringInstance:
    """Most probable completion of ``evidence``: (max, ×)."""
    return _make_instance(factors, evidence, MAX_PRODUCT, domains)


def make_instance_partition(factors, evidence=None, domains=None) -> SemiringInstance:
    """Partition function (or evidence probability): (+, ×)."""
    return _make_instance(factors, evidence, SUM_PRODUCT, domains)


def make_instance_maxsum(factors, evidence=None, domains=None) -> SemiringInstance:
    """Maximise a sum of local objectives: (max, +)."""
    return _make_instance(factors, evidence, MAX_SUM, domains)


# --------------------------------------------------------------------------
# DPLL with component caching over an arbitrary semiring

class _SumProdSearch:
    def __init__(self, inst: SemiringInstance, policy: OrderPolicy, cache: CacheStore):
        self.inst = inst
        self.s = inst.semiring
        self.factors = inst.factors
        self.cache = cache
        self.chooser = Chooser(policy)
        self.stats = SearchStats()
        self.rho = {}

    def component(self, idxs):
        scope = sorted({v for i in idxs for v in self.factors[i].scope})
        free = tuple(v for v in scope if v not in self.rho)
        fixed = tuple((v, self.rho[v]) for v in scope if v in self.rho)
        self.stats.components_created += 1
        return (tuple(idxs), fixed), free

    def known(self, comp):
        return self.cache.lookup(comp[0])

    def set_value(self, comps):
        """Value of a set of components, or MISSING when it is not known."""
        s = self.s
        total = s.one
        missing = False
        for key, _ in comps:
            v = self.cache.peek(key)
            if v is CacheStore.MISSING:
                missing = True
            elif s.zero_annihilates and s.is_zero(v):
                return s.zero
            else:
                total = s.mul(total, v)
        return CacheStore.MISSING if missing else total

    def solve(self, comps):
        s = self.s
        unknown = []
        total = s.one
        for comp in comps:
            v = self.cache.lookup(comp[0])
            if v is CacheStore.MISSING:
                unknown.append(comp)
            elif s.zero_annihilates and s.is_zero(v):
                return s.zero
            else:
                total = s.mul(total, v)
        if not unknown:
            return total
        occ = {}
        owner = {}
        for comp in unknown:
            (idxs, _), free = comp
            for i in idxs:
                for v in self.factors[i].scope:
                    if v not in self.rho:
                        occ[v] = occ.get(v, 0) + 1
                        owner[v] = comp
        x = self.chooser.pick(occ)
        self.stats.decisions += 1
        phi = owner[x]
        rest = [c for c in unknown if c is not phi]
        idxs = phi[0][0]
        p = s.zero
        for d in range(self.inst.domains[x]):
            self.rho[x] = d
            alpha = s.one
            pending = []
            for i in idxs:
                f = self.factors[i]
                if all(v in self.rho for v in f.scope):
                    if x in f.scope:
                        alpha = s.mul(alpha, f.value(self.rho))
                else:
                    pending.append(i)
            if s.zero_annihilates and s.is_zero(alpha):
                self.stats.conflicts += 1
                del self.rho[x]
                continue
            sub = [self.component(g) for g in _factor_groups(self.factors, pending, self.rho)]
            self.solve(rest + sub)
            val = self.set_value(sub)
            del self.rho[x]
            if val is CacheStore.MISSING:
                # a sibling component is known zero, so the whole set is zero
                return s.zero
            p = s.add(p, s.mul(alpha, val))
        self.cache.store(phi[0], p)
        return self.set_value(comps)


def sumprod_dpll_cache(inst: SemiringInstance, policy: OrderPolicy = None, cache: CacheStore = None):
    """Branch on variables, split into components, cache solved components.

    Components are keyed by the original factors they contain plus the
    assignments that reduced those factors.
    """
    policy = policy or OrderPolicy.dynamic()
    if policy.kind.name == "StaticList":
        policy.check(inst.variables)
    run = _SumProdSearch(inst, policy, cache if cache is not None else CacheStore())
    s = inst.semiring
    scalar = s.one
    for f in inst.factors:
        if not f.scope:
            scalar = s.mul(scalar, f.table[0])
    for v in inst.unconstrained():
        scalar = s.mul(scalar, inst.free_factor(v))
    if s.zero_annihilates and s.is_zero(scalar):
        value = s.zero
    else:
        nonscalar = [i for i, f in enumerate(inst.factors) if f.scope]
        comps = [run.component(g) for g in _factor_groups(inst.factors, nonscalar)]
        value = s.mul(scalar, run.solve(comps))
    run.stats.absorb_cache(run.cache)
    run.stats.value = value
    return value, run.stats
