import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from sumprod_dpll.decomposition import (Hypergraph, _path_labels, _boundary_labels,
                                        induced_width)
from sumprod_dpll.formula import Formula
from sumprod_dpll.semiring import COUNTING, Factor, SemiringInstance

# Hypergraph used by the worked width examples
H5 = Hypergraph((1, 2, 3, 4, 5), ({1, 2, 3}, {1, 4}, {2, 5}, {3, 5}, {4, 5}))
# a=1 b=2 c=3 d=4 e=5 f=6 x=7
TWO_HALVES = Formula(7, ((1, 2, 3, 7), (-1, 2, 3), (1, -2, 3), (4, 5, 6, 7), (-4, 5, 6), (4, -5, 6)))
DIAMOND_EDGES = ({1, 2, 3}, {1, 4}, {2, 5}, {3, 5})


def random_formula(rng, n, m, k, weighted=False):
    clauses = []
    for _ in range(m):
        kk = min(k, n)
        vs = sorted(rng.sample(range(1, n + 1), kk))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    weights = {}
    if weighted:
        weights = {v: Fraction(rng.randint(0, 7), 7) for v in range(1, n + 1) if rng.random() < 0.7}
    return Formula(n, tuple(clauses), weights)


def random_instance(rng, n, nf, semiring=COUNTING, max_arity=3, lo=0, hi=3):
    factors = []
    for _ in range(nf):
        k = rng.randint(1, min(max_arity, n))
        scope = rng.sample(range(1, n + 1), k)
        factors.append(Factor(scope, (2,) * k,
                              [semiring.lift(rng.randint(lo, hi)) for _ in range(2 ** k)]))
    return SemiringInstance({v: 2 for v in range(1, n + 1)}, factors, semiring)


def random_hypergraph(rng, max_vertices=10, max_edges=12):
    n = rng.randint(1, max_vertices)
    m = rng.randint(1, max_edges)
    edges = [set(rng.sample(range(1, n + 1), rng.randint(1, min(4, n)))) for _ in range(m)]
    return Hypergraph(tuple(range(1, n + 1)), tuple(edges))


@st.composite
def formulas(draw, max_vars=8, max_clauses=14, weighted=False):
    n = draw(st.integers(1, max_vars))
    clause = st.lists(st.integers(1, n), min_size=1, max_size=min(3, n), unique=True).flatmap(
        lambda vs: st.tuples(*[st.sampled_from((v, -v)) for v in sorted(vs)]))
    clauses = draw(st.lists(clause, max_size=max_clauses))
    weights = {}
    if weighted:
        weights = draw(st.dictionaries(st.integers(1, n),
                                       st.fractions(0, 1, max_denominator=9)))
    return Formula(n, tuple(clauses), weights)


# --------------------------------------------------------------------------
# exhaustive width oracles (small hypergraphs only)

def all_shapes(items):
    """Every unordered binary tree with the given leaves, as nested pairs."""
    items = list(items)
    if len(items) == 1:
        yield items[0]
        return
    first, rest = items[0], items[1:]
    # split the remaining leaves; ``first`` always goes left to avoid mirror duplicates
    for r in range(0, len(rest)):
        for left_extra in itertools.combinations(rest, r):
            right = [x for x in rest if x not in left_extra]
            for ls in all_shapes([first, *left_extra]):
                for rs in all_shapes(right):
                    yield (ls, rs)


def _shape_children(shape, edges):
    children, leaf = {}, {}
    counter = itertools.count(len(edges))

    def build(s):
        if isinstance(s, int):
            children[s] = ()
            leaf[s] = frozenset(edges[s])
            return s
        nid = next(counter)
        children[nid] = (build(s[0]), build(s[1]))
        return nid

    return children, build(shape), leaf


def exhaustive_branch_width(h):
    best = None
    for shape in all_shapes(range(len(h.edges))):
        children, root, leaf = _shape_children(shape, h.edges)
        labels = _boundary_labels(children, root, leaf)
        w = max(len(leaf[n]) if not children[n] else len(labels[n]) for n in children)
        best = w if best is None else min(best, w)
    return best


def exhaustive_tree_width(h):
    best = None
    for shape in all_shapes(range(len(h.edges))):
        children, root, leaf = _shape_children(shape, h.edges)
        labels = _path_labels(children, root, leaf)
        w = max(len(leaf[n]) if not children[n] else len(labels[n]) for n in children) - 1
        best = w if best is None else min(best, w)
    return max(best, 0)


def exhaustive_elimination_width(h):
    return min(induced_width(h, p)[0] for p in itertools.permutations(h.vertices))


@pytest.fixture
def rng():
    return random.Random(20240917)
