"""Hypergraphs, width measures and conversions between decompositions.

Four interchangeable width structures live here: branch decompositions,
tree decompositions, elimination orders and pseudo trees. All constructors
break ties by smallest vertex id so their output is reproducible.
"""

from __future__ import annotations

import enum
import random
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Union

import networkx as nx

from .errors import HypergraphTooSmall, InvalidDecomposition


@dataclass(frozen=True)
class Hypergraph:
    vertices: tuple
    edges: tuple

    def __post_init__(self):
        vertices = tuple(sorted(set(self.vertices)))
        edges = tuple(frozenset(e) for e in self.edges)
        vset = set(vertices)
        for i, e in enumerate(edges):
            if not e:
                raise ValueError(f"edge {i} is empty")
            if not e <= vset:
                raise ValueError(f"edge {i} uses vertices {sorted(e - vset)} not in the vertex set")
        object.__setattr__(self, "vertices", vertices)
        object.__setattr__(self, "edges", edges)

    def edge_tuples(self) -> list:
        return [tuple(sorted(e)) for e in self.edges]


@dataclass(frozen=True)
class ElimOrder:
    """``order[i]`` is the i-th vertex eliminated."""

    order: tuple

    def __post_init__(self):
        object.__setattr__(self, "order", tuple(int(v) for v in self.order))
        if len(set(self.order)) != len(self.order):
            raise InvalidDecomposition("elimination order repeats a vertex")

    def __iter__(self):
        return iter(self.order)

    def __len__(self):
        return len(self.order)


@dataclass(frozen=True)
class TreeNode:
    id: int
    children: tuple = ()
    label: frozenset = frozenset()
    edge: Optional[int] = None  # hyperedge index carried by a leaf

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class _BinaryTree:
    nodes: tuple
    root: int
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        nodes = tuple(sorted(self.nodes, key=lambda n: n.id))
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "_by_id", {n.id: n for n in nodes})

    def node(self, node_id: int) -> TreeNode:
        return self._by_id[node_id]

    def preorder(self) -> list:
        out, stack = [], [self.root]
        while stack:
            n = self._by_id[stack.pop()]
            out.append(n)
            stack.extend(reversed(n.children))
        return out

    def leaves(self) -> list:
        return [n for n in self.preorder() if n.is_leaf]

    def parents(self) -> dict:
        par = {self.root: None}
        for n in self.nodes:
            for c in n.children:
                par[c] = n.id
        return par

    def depths(self) -> dict:
        depth = {self.root: 0}
        for n in self.preorder():
            for c in n.children:
                depth[c] = depth[n.id] + 1
        return depth

    def label(self, node_id: int) -> frozenset:
        return self._by_id[node_id].label

    def max_label(self) -> int:
        return max((len(n.label) for n in self.nodes), default=0)


class BranchDecomp(_BinaryTree):
    """Binary tree whose leaves carry hyperedges one-to-one.

    A leaf is labelled with its hyperedge; an internal node with the
    vertices shared between the edges below it and the edges elsewhere.
    """


class TreeDecomp(_BinaryTree):
    """Binary tree with leaf labels covering the hyperedges and internal
    labels closed under the path (running intersection) rule."""


@dataclass(frozen=True)
class PseudoTree:
    """Rooted forest over the graph's vertices, given as a parent map.

    Roots have parent ``None``; several roots stand for a forest hung under
    a virtual root.
    """

    parent: dict

    def __post_init__(self):
        object.__setattr__(self, "parent", {int(v): (None if p is None else int(p))
                                            for v, p in dict(self.parent).items()})

    __hash__ = None

    @property
    def roots(self) -> list:
        return sorted(v for v, p in self.parent.items() if p is None)

    def children(self) -> dict:
        ch = {v: [] for v in self.parent}
        for v in sorted(self.parent):
            p = self.parent[v]
            if p is not None:
                ch[p].append(v)
        return ch

    def ancestors(self, v: int) -> list:
        out, seen = [], {v}
        p = self.parent[v]
        while p is not None:
            if p in seen:
                raise InvalidDecomposition(f"cycle in pseudo tree through {p}")
            seen.add(p)
            out.append(p)
            p = self.parent[p]
        return out

    def depth(self, v: int) -> int:
        return len(self.ancestors(v))

    def height(self) -> int:
        return max((self.depth(v) for v in self.parent), default=-1) + 1


class Heuristic(enum.Enum):
    MinFill = "min-fill"
    MinDegree = "min-degree"


Decomposition = Union[BranchDecomp, TreeDecomp, ElimOrder, PseudoTree]


# --------------------------------------------------------------------------
# construction from formulas / instances

def hypergraph_of(obj) -> Hypergraph:
    """One edge per clause (or per non-scalar factor scope)."""
    if hasattr(obj, "clauses"):
        edges = [frozenset(abs(l) for l in c) for c in obj.clauses if c]
        return Hypergraph(tuple(range(1, obj.num_vars + 1)), tuple(edges))
    edges = [frozenset(f.scope) for f in obj.factors if f.scope]
    return Hypergraph(tuple(obj.domains), tuple(edges))


def primal_graph(h: Hypergraph) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(h.vertices)
    for e in h.edges:
        vs = sorted(e)
        for i, u in enumerate(vs):
            for v in vs[i + 1:]:
                g.add_edge(u, v)
    return g


def _check_order(vertices: Iterable[int], pi) -> tuple:
    order = tuple(pi.order if isinstance(pi, ElimOrder) else pi)
    if sorted(order) != sorted(vertices):
        raise InvalidDecomposition("elimination order is not a permutation of the vertices")
    return order


def induced_width(h: Hypergraph, pi) -> tuple:
    """Eliminate vertices in order, merging the edges that contain each one.

    Returns ``(width, trace)`` where ``trace`` holds the hypergraphs
    ``H_n, ..., H_1`` (the input first). The width is the size of the largest
    edge created by a merge; original edges are not counted, so a width-w
    order yields a tree decomposition of width at most w.
    """
    order = _check_order(h.vertices, pi)
    edges = list(h.edges)
    remaining = list(h.vertices)
    trace = [h]
    width = 0
    for step, v in enumerate(order):
        touching = [e for e in edges if v in e]
        rest = [e for e in edges if v not in e]
        merged = frozenset().union(*touching) - {v}
        width = max(width, len(merged))
        edges = ([merged] if merged else []) + rest
        remaining.remove(v)
        if step < len(order) - 1:
            trace.append(Hypergraph(tuple(remaining), tuple(edges)))
    return width, trace


def _path_labels(children: dict, root: int, leaf_sets: dict) -> dict:
    """Internal label rule shared by both decompositions.

    A vertex labels an internal node when it occurs in leaves reached
    through at least two of the node's sides (each child, and outside).
    """
    below = {}
    order = _postorder(children, root)
    for n in order:
        if not children[n]:
            below[n] = Counter(leaf_sets[n])
        else:
            c = Counter()
            for ch in children[n]:
                c.update(below[ch])
            below[n] = c
    total = below[root]
    labels = {}
    for n in order:
        if not children[n]:
            continue
        lab = set()
        for v, cnt in below[n].items():
            sides = sum(1 for ch in children[n] if below[ch][v] > 0)
            if total[v] - cnt > 0:
                sides += 1
            if sides >= 2:
                lab.add(v)
        labels[n] = frozenset(lab)
    return labels


def _postorder(children: dict, root: int) -> list:
    out, stack = [], [(root, False)]
    while stack:
        n, done = stack.pop()
        if done:
            out.append(n)
            continue
        stack.append((n, True))
        for ch in reversed(children[n]):
            stack.append((ch, False))
    return out


def _boundary_labels(children: dict, root: int, leaf_edges: dict) -> dict:
    """Branch-decomposition labels for internal nodes: below ∩ elsewhere."""
    order = _postorder(children, root)
    below = {}
    for n in order:
        if not children[n]:
            below[n] = Counter(leaf_edges[n])
        else:
            c = Counter()
            for ch in children[n]:
                c.update(below[ch])
            below[n] = c
    total = below[root]
    return {n: frozenset(v for v, cnt in below[n].items() if total[v] - cnt > 0)
            for n in order if children[n]}


def _shape_to_children(shape) -> tuple:
    """Nested pairs of edge indices -> (children map, root, leaf edge map)."""
    children, leaf_edge = {}, {}
    counter = [0]

    def build(s):
        nid = counter[0]
        counter[0] += 1
        if isinstance(s, int):
            children[nid] = ()
            leaf_edge[nid] = s
        else:
            if len(s) != 2:
                raise InvalidDecomposition(f"internal node with {len(s)} children")
            children[nid] = ()
            kids = tuple(build(c) for c in s)
            children[nid] = kids
        return nid

    root = build(shape)
    return children, root, leaf_edge


def branchdec_from_shape(h: Hypergraph, shape) -> BranchDecomp:
    """Build a branch decomposition from nested pairs of edge indices."""
    children, root, leaf_edge = _shape_to_children(shape)
    return _make_branchdec(h, children, root, leaf_edge)


def _make_branchdec(h, children, root, leaf_edge) -> BranchDecomp:
    edges = {n: h.edges[i] for n, i in leaf_edge.items()}
    labels = _boundary_labels(children, root, edges)
    nodes = []
    for n, kids in children.items():
        if kids:
            nodes.append(TreeNode(n, kids, labels[n]))
        else:
            nodes.append(TreeNode(n, (), edges[n], leaf_edge[n]))
    return BranchDecomp(tuple(nodes), root)


def treedec_from_shape(h: Hypergraph, shape, leaf_labels: dict = None) -> TreeDecomp:
    """Build a tree decomposition from nested pairs of edge indices.

    Leaf labels default to the hyperedges; ``leaf_labels`` (keyed by edge
    index) may enlarge them. Internal labels follow the path rule.
    """
    children, root, leaf_edge = _shape_to_children(shape)
    return _make_treedec(h, children, root, leaf_edge, leaf_labels)


def _make_treedec(h, children, root, leaf_edge, leaf_labels=None) -> TreeDecomp:
    leaf_sets = {}
    for n, i in leaf_edge.items():
        lab = h.edges[i]
        if leaf_labels and i in leaf_labels:
            lab = frozenset(leaf_labels[i])
        leaf_sets[n] = lab
    labels = _path_labels(children, root, leaf_sets)
    nodes = []
    for n, kids in children.items():
        if kids:
            nodes.append(TreeNode(n, kids, labels[n]))
        else:
            nodes.append(TreeNode(n, (), leaf_sets[n], leaf_edge[n]))
    return TreeDecomp(tuple(nodes), root)


# --------------------------------------------------------------------------
# widths and validation

def width_of(d, h: Hypergraph = None) -> int:
    """Branch width (max label) or tree width (max label minus one)."""
    problems = validate(d, h) if h is not None else _structure_violations(d)
    if problems:
        raise InvalidDecomposition("; ".join(problems))
    if isinstance(d, BranchDecomp):
        return d.max_label()
    if isinstance(d, TreeDecomp):
        return max(d.max_label() - 1, 0)
    raise TypeError(f"width_of expects a branch or tree decomposition, got {type(d).__name__}")


def _structure_violations(d: _BinaryTree) -> list:
    out = []
    ids = [n.id for n in d.nodes]
    if d.root not in ids:
        return [f"root {d.root} is not a node"]
    seen = set()
    for n in d.preorder():
        if n.id in seen:
            return [f"node {n.id} reached twice (not a tree)"]
        seen.add(n.id)
        if len(n.children) not in (0, 2):
            out.append(f"node {n.id} has {len(n.children)} children (binary tree required)")
    if len(seen) != len(ids):
        out.append(f"nodes {sorted(set(ids) - seen)} unreachable from the root")
    return out


def validate(d, against=None) -> list:
    """Return every violated invariant of ``d`` (empty list means valid)."""
    if isinstance(d, PseudoTree):
        return _validate_pseudo_tree(d, against)
    if isinstance(d, ElimOrder):
        verts = against.vertices if isinstance(against, Hypergraph) else list(against.nodes)
        if sorted(d.order) != sorted(verts):
            return ["elimination order is not a permutation of the vertices"]
        return []
    out = _structure_violations(d)
    if out:
        return out
    h = against
    if isinstance(d, BranchDecomp):
        leaf_idx = [n.edge for n in d.leaves()]
        if h is not None:
            if sorted(i for i in leaf_idx if i is not None) != list(range(len(h.edges))) \
                    or None in leaf_idx:
                out.append("leaves are not in one-to-one correspondence with hyperedges")
                return out
            children = {n.id: n.children for n in d.nodes}
            leaf_edges = {n.id: h.edges[n.edge] for n in d.leaves()}
            expect = _boundary_labels(children, d.root, leaf_edges)
            for n in d.nodes:
                want = leaf_edges[n.id] if n.is_leaf else expect[n.id]
                if n.label != want:
                    out.append(f"node {n.id} label {sorted(n.label)} != {sorted(want)}")
        return out
    if isinstance(d, TreeDecomp):
        leaves = d.leaves()
        if h is not None:
            for i, e in enumerate(h.edges):
                if not any(e <= n.label for n in leaves):
                    out.append(f"hyperedge {i} {sorted(e)} not contained in any leaf label")
        out.extend(_running_intersection(d))
        children = {n.id: n.children for n in d.nodes}
        derived = _path_labels(children, d.root, {n.id: n.label for n in leaves})
        for nid, lab in derived.items():
            if not lab <= d.label(nid):
                out.append(f"node {nid} misses path-rule vertices {sorted(lab - d.label(nid))}")
        return out
    raise TypeError(f"cannot validate {type(d).__name__}")


def _running_intersection(d: _BinaryTree) -> list:
    out = []
    par = d.parents()
    verts = set().union(*(n.label for n in d.nodes)) if d.nodes else set()
    for v in sorted(verts):
        holders = {n.id for n in d.nodes if v in n.label}
        # connected iff exactly one holder has its parent outside the set
        tops = [n for n in holders if par[n] not in holders]
        if len(tops) > 1:
            out.append(f"vertex {v} labels disconnected regions (running intersection)")
    return out


def _validate_pseudo_tree(t: PseudoTree, g) -> list:
    out = []
    if isinstance(g, Hypergraph):
        g = primal_graph(g)
    nodes = set(t.parent)
    for v, p in t.parent.items():
        if p is not None and p not in nodes:
            out.append(f"parent {p} of {v} is not a vertex")
    if out:
        return out
    anc = {}
    for v in nodes:
        try:
            anc[v] = set(t.ancestors(v))
        except InvalidDecomposition as exc:
            out.append(str(exc))
            return out
    if g is not None:
        if set(g.nodes) != nodes:
            out.append("pseudo tree vertices differ from graph vertices")
        for u, v in sorted(tuple(sorted(e)) for e in g.edges):
            if u in anc and v in anc and u not in anc[v] and v not in anc[u]:
                out.append(f"edge ({u},{v}) joins vertices that are not ancestor-related")
    return out


# --------------------------------------------------------------------------
# conversions

def order_from_treedec(h: Hypergraph, t: TreeDecomp) -> ElimOrder:
    """Deepest-first order: vertex x sits at the deepest common ancestor of
    the leaves containing it, and deeper vertices are eliminated first."""
    problems = validate(t, h)
    if problems:
        raise InvalidDecomposition("; ".join(problems))
    par = t.parents()
    depth = t.depths()
    holders = {}
    for leaf in t.leaves():
        for v in leaf.label:
            holders.setdefault(v, []).append(leaf.id)

    def lca(a, b):
        while depth[a] > depth[b]:
            a = par[a]
        while depth[b] > depth[a]:
            b = par[b]
        while a != b:
            a, b = par[a], par[b]
        return a

    node_depth = {}
    for v, ls in holders.items():
        n = ls[0]
        for other in ls[1:]:
            n = lca(n, other)
        node_depth[v] = depth[n]
    isolated = [v for v in h.vertices if v not in node_depth]
    ranked = sorted(node_depth, key=lambda v: (-node_depth[v], v))
    return ElimOrder(tuple(isolated) + tuple(v for v in ranked if v in set(h.vertices)))


def _merge_shape_from_order(h: Hypergraph, order: tuple):
    """Merge per-edge trees vertex by vertex in elimination order.

    When ``x`` is eliminated, every tree still mentioning ``x`` is merged and
    ``x`` is dropped from the merged tree's vertex set, so the root of each
    merged tree only shares the created hyperedge with the rest.
    Returns ``(children, root, leaf_edge)``. Multi-way merges become
    left-leaning chains of binary nodes.
    """
    if not h.edges:
        raise HypergraphTooSmall("hypergraph has no edges")
    children, leaf_edge = {}, {}
    trees = []  # (node id, uneliminated vertices)
    for i, e in enumerate(h.edges):
        children[i] = ()
        leaf_edge[i] = i
        trees.append((i, frozenset(e)))
    next_id = len(h.edges)

    def merge(group):
        nonlocal next_id
        cur_id, cur_vs = group[0]
        for nid, vs in group[1:]:
            children[next_id] = (cur_id, nid)
            cur_id, cur_vs = next_id, cur_vs | vs
            next_id += 1
        return cur_id, cur_vs

    for x in order:
        group = [t for t in trees if x in t[1]]
        if not group:
            continue
        pos = trees.index(group[0])
        nid, vs = merge(group)
        trees = [t for t in trees if t not in group]
        trees.insert(pos, (nid, vs - {x}))
    if len(trees) > 1:
        trees = [merge(trees)]
    return children, trees[0][0], leaf_edge


def treedec_from_order(h: Hypergraph, pi) -> TreeDecomp:
    order = _check_order(h.vertices, pi)
    children, root, leaf_edge = _merge_shape_from_order(h, order)
    return _make_treedec(h, children, root, leaf_edge)


def branchdec_from_order(h: Hypergraph, pi) -> BranchDecomp:
    order = _check_order(h.vertices, pi)
    children, root, leaf_edge = _merge_shape_from_order(h, order)
    return _make_branchdec(h, children, root, leaf_edge)


def heuristic_order(h: Hypergraph, method=Heuristic.MinFill, seed: int = None) -> ElimOrder:
    """Greedy elimination order on the primal graph.

    Vertices in no edge go first. Ties go to the smallest id, or to a
    seeded random pick among the tied vertices when ``seed`` is given.
    """
    method = Heuristic(method)
    rng = random.Random(seed) if seed is not None else None
    in_edge = set().union(*h.edges) if h.edges else set()
    order = [v for v in h.vertices if v not in in_edge]
    adj = {v: set() for v in in_edge}
    for e in h.edges:
        for u in e:
            adj[u].update(e - {u})

    def score(v):
        nb = adj[v]
        if method is Heuristic.MinDegree:
            return len(nb)
        nbl = sorted(nb)
        return sum(1 for i, a in enumerate(nbl) for b in nbl[i + 1:] if b not in adj[a])

    while adj:
        scores = {v: score(v) for v in adj}
        best = min(scores.values())
        tied = sorted(v for v, s in scores.items() if s == best)
        v = rng.choice(tied) if rng is not None else tied[0]
        nb = adj.pop(v)
        for u in nb:
            adj[u].discard(v)
            adj[u].update(nb - {u})
        order.append(v)
    return ElimOrder(tuple(order))


def pseudo_tree_from_order(g, pi) -> PseudoTree:
    """Bucket-tree pseudo tree: each vertex hangs under its earliest-eliminated
    later neighbour in the induced (filled-in) graph."""
    if isinstance(g, Hypergraph):
        g = primal_graph(g)
    order = _check_order(g.nodes, pi)
    pos = {v: i for i, v in enumerate(order)}
    adj = {v: set(g.neighbors(v)) for v in g.nodes}
    parent = {}
    for v in order:
        later = adj[v]
        parent[v] = min(later, key=lambda u: pos[u]) if later else None
        for u in later:
            adj[u].discard(v)
            adj[u].update(later - {u})
        adj[v] = set()
    return PseudoTree(parent)


def static_order_from_branchdec(b: BranchDecomp) -> list:
    """Preorder walk appending each label's not-yet-seen vertices."""
    seen, out = set(), []
    for n in b.preorder():
        for v in sorted(n.label - seen):
            seen.add(v)
            out.append(v)
    return out


def complete_static_order(order: Sequence[int], num_vars: int) -> list:
    """Append variables missing from ``order`` in id order."""
    present = set(order)
    return list(order) + [v for v in range(1, num_vars + 1) if v not in present]
