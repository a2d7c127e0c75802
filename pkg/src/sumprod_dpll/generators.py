"""Benchmark formula families."""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ParameterOutOfRange
from .formula import Formula


@dataclass(frozen=True)
class PearlsLayout:
    """Variable numbering for the string-of-pearls family.

    ``n`` holes on the string, ``m`` pearls in the bag. ``edge(i, j)`` says
    pearl j sits in hole i; ``colour(j)`` is 1 for red, 0 for blue.
    """

    m: int
    n: int

    def edge(self, i: int, j: int) -> int:
        return (i - 1) * self.m + j

    def colour(self, j: int) -> int:
        return self.n * self.m + j

    @property
    def num_vars(self) -> int:
        return self.n * self.m + self.m


def gen_pearls(m: int, n: int) -> Formula:
    """Negated string-of-pearls SP(m, n): unsatisfiable for every m, n >= 2.

    Pairs in the at-most-one groups are emitted once each; the colour
    propagation clauses range over ordered pairs of distinct pearls.
    """
    if m < 2 or n < 2:
        raise ParameterOutOfRange(f"string of pearls needs m, n >= 2 (got m={m}, n={n})")
    lay = PearlsLayout(m, n)
    p, c = lay.edge, lay.colour
    pearls, holes = range(1, m + 1), range(1, n + 1)
    clauses = []
    # every hole holds a pearl
    clauses += [tuple(p(i, j) for j in pearls) for i in holes]
    # at most one pearl per hole
    clauses += [(-p(i, j), -p(i, k)) for i in holes for j in pearls for k in pearls if j < k]
    # a pearl occupies at most one hole
    clauses += [(-p(i, j), -p(k, j)) for j in pearls for i in holes for k in holes if i < k]
    # first hole red, last hole blue
    clauses += [(-p(1, j), c(j)) for j in pearls]
    clauses += [(-p(n, j), -c(j)) for j in pearls]
    # neighbours share a colour
    for i in range(1, n):
        for j in pearls:
            for k in pearls:
                if j != k:
                    clauses.append((-p(i, j), -p(i + 1, k), -c(j), c(k)))
                    clauses.append((-p(i, j), -p(i + 1, k), c(j), -c(k)))
    return Formula(lay.num_vars, tuple(clauses))


def gen_blocks(k: int) -> Formula:
    """``k`` disjoint 3-clauses over ``3k`` variables (7**k models)."""
    if k < 1:
        raise ParameterOutOfRange(f"need at least one block (got {k})")
    return Formula(3 * k, tuple((3 * i - 2, 3 * i - 1, 3 * i) for i in range(1, k + 1)))


def gen_random(n: int, m: int, k: int, seed: int) -> Formula:
    """``m`` clauses of ``k`` distinct variables each, signs uniform."""
    if not 1 <= k <= n or m < 1:
        raise ParameterOutOfRange(f"need 1 <= k <= n and m >= 1 (got n={n}, m={m}, k={k})")
    rng = random.Random(seed)
    clauses = []
    for _ in range(m):
        vs = sorted(rng.sample(range(1, n + 1), k))
        clauses.append(tuple(v if rng.random() < 0.5 else -v for v in vs))
    return Formula(n, tuple(clauses))
