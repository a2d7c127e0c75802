import itertools
import random

import networkx as nx
import pytest

from conftest import (H5, DIAMOND_EDGES, TWO_HALVES, exhaustive_branch_width, exhaustive_elimination_width,
                      exhaustive_tree_width, random_hypergraph)
from sumprod_dpll.decomposition import (BranchDecomp, ElimOrder, Heuristic, Hypergraph,
                                        PseudoTree, TreeDecomp, TreeNode, branchdec_from_order,
                                        branchdec_from_shape, complete_static_order,
                                        heuristic_order, hypergraph_of, induced_width,
                                        order_from_treedec, primal_graph, pseudo_tree_from_order,
                                        static_order_from_branchdec, treedec_from_order,
                                        treedec_from_shape, validate, width_of)
from sumprod_dpll.errors import HypergraphTooSmall, InvalidDecomposition
from sumprod_dpll.formula import Formula

# the branch decomposition of the worked example, over edge indices of H5
FIG1_SHAPE = ((0, 1), (2, (3, 4)))
FIG2_SHAPE = ((((0, 1), 2), 3), 4)


def edges_of(h):
    return sorted(tuple(sorted(e)) for e in h.edges)


def test_hypergraph_of_formula():
    h = hypergraph_of(Formula(5, ((1, 2), (3, 4))))
    assert h.vertices == (1, 2, 3, 4, 5)
    assert edges_of(h) == [(1, 2), (3, 4)]
    assert set(hypergraph_of(TWO_HALVES).edges[0]) == {1, 2, 3, 7}
    assert len(hypergraph_of(TWO_HALVES).edges) == 6


def test_hypergraph_rejects_empty_edge_and_stray_vertex():
    with pytest.raises(ValueError):
        Hypergraph((1, 2), (set(),))
    with pytest.raises(ValueError):
        Hypergraph((1, 2), ({1, 3},))


def test_primal_graph():
    g = primal_graph(Hypergraph((1, 2, 3, 4, 5), DIAMOND_EDGES))
    assert sorted(g.edges) == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 5), (3, 5)]
    assert list(primal_graph(Hypergraph((1, 2), ({1, 2},))).edges) == [(1, 2)]
    g = primal_graph(Hypergraph((1, 2, 3, 4), ({1, 2}, {3, 4})))
    assert nx.number_connected_components(g) == 2 and g.number_of_edges() == 2


def test_elimination_trace():
    width, trace = induced_width(H5, ElimOrder((1, 2, 3, 4, 5)))
    assert width == 3
    expected = [
        [(1, 2, 3), (1, 4), (2, 5), (3, 5), (4, 5)],
        [(2, 3, 4), (2, 5), (3, 5), (4, 5)],
        [(3, 4, 5), (3, 5), (4, 5)],
        [(4, 5), (4, 5)],
        [(5,)],
    ]
    assert [h.edge_tuples() for h in trace] == expected
    assert [len(h.vertices) for h in trace] == [5, 4, 3, 2, 1]


def test_induced_width_small_cases():
    chain = Hypergraph((1, 2, 3, 4), ({1, 2}, {2, 3}, {3, 4}))
    assert induced_width(chain, (1, 2, 3, 4))[0] == 1
    assert induced_width(Hypergraph((1,), ()), (1,))[0] == 0
    assert induced_width(Hypergraph((1, 2, 3), ({1, 2, 3},)), (1, 2, 3))[0] == 2
    with pytest.raises(InvalidDecomposition):
        induced_width(chain, (1, 2, 3))


def test_five_edge_branch_decomposition():
    b = branchdec_from_shape(H5, FIG1_SHAPE)
    assert validate(b, H5) == []
    assert width_of(b, H5) == 3
    for leaf in b.leaves():
        assert leaf.label == H5.edges[leaf.edge]


def test_left_deep_tree_decomposition():
    t = treedec_from_shape(H5, FIG2_SHAPE)
    assert validate(t, H5) == []
    assert width_of(t, H5) == 3


def test_tree_order_tree_chain():
    b = branchdec_from_shape(H5, FIG1_SHAPE)
    t = treedec_from_shape(H5, FIG2_SHAPE)
    assert width_of(t) <= 2 * width_of(b)
    pi = order_from_treedec(H5, t)
    assert pi.order == (1, 2, 3, 4, 5)
    assert induced_width(H5, pi)[0] == width_of(t) == 3
    t3 = treedec_from_order(H5, pi)
    assert validate(t3, H5) == []
    assert width_of(t3) == 3


def test_two_disjoint_edges():
    h = Hypergraph((1, 2, 3, 4), ({1, 2}, {3, 4}))
    b = branchdec_from_order(h, (1, 2, 3, 4))
    assert b.label(b.root) == frozenset()
    # leaves carry their whole edge, so the width is the edge size
    assert width_of(b, h) == 2
    assert width_of(treedec_from_order(h, (3, 1, 4, 2)), h) == 1


def test_single_edge():
    h = Hypergraph((1, 2, 3), ({1, 2, 3},))
    t = treedec_from_order(h, (1, 2, 3))
    assert len(t.nodes) == 1 and width_of(t, h) == 2
    pi = order_from_treedec(h, t)
    assert induced_width(h, pi)[0] == 2
    with pytest.raises(HypergraphTooSmall):
        treedec_from_order(Hypergraph((1,), ()), (1,))


def test_validate_reports_every_violation():
    # vertex 1 in both outer leaves but missing from the node between them
    leaves = [TreeNode(0, (), frozenset({1, 2}), 0), TreeNode(1, (), frozenset({2, 3}), 1),
              TreeNode(2, (), frozenset({1, 3}), 2)]
    inner = TreeNode(3, (0, 1), frozenset({2, 3}))
    root = TreeNode(4, (3, 2), frozenset({1, 3}))
    t = TreeDecomp(tuple(leaves) + (inner, root), 4)
    h = Hypergraph((1, 2, 3), ({1, 2}, {2, 3}, {1, 3}))
    problems = validate(t, h)
    assert any("running intersection" in p or "1" in p for p in problems)
    assert problems
    bad = BranchDecomp((TreeNode(0, (1,), frozenset()), TreeNode(1, (), frozenset({1}), 0)), 0)
    assert validate(bad)


def test_validate_pseudo_tree_flags_cross_edges():
    g = primal_graph(Hypergraph((1, 2, 3), ({1, 2}, {2, 3})))
    assert validate(PseudoTree({1: None, 2: 1, 3: 2}), g) == []
    assert validate(PseudoTree({1: None, 2: 1, 3: 1}), g)


def test_heuristic_orders():
    chain = Hypergraph((1, 2, 3, 4), ({1, 2}, {2, 3}, {3, 4}))
    pi = heuristic_order(chain, Heuristic.MinDegree)
    assert induced_width(chain, pi)[0] == exhaustive_elimination_width(chain)
    for method in Heuristic:
        assert induced_width(H5, heuristic_order(H5, method))[0] <= 4
    empty = Hypergraph((1, 2, 3), ())
    assert heuristic_order(empty).order == (1, 2, 3)
    seeded = [heuristic_order(H5, Heuristic.MinFill, seed=s).order for s in range(3)]
    assert seeded == [heuristic_order(H5, Heuristic.MinFill, seed=s).order for s in range(3)]


def test_isolated_vertices_go_first():
    h = Hypergraph((1, 2, 3, 4), ({2, 3},))
    assert heuristic_order(h).order[:2] == (1, 4)


def test_pseudo_tree_diamond():
    g = primal_graph(Hypergraph((1, 2, 3, 4, 5), DIAMOND_EDGES))
    t = pseudo_tree_from_order(g, (4, 5, 3, 2, 1))
    assert t.parent == {4: 1, 5: 3, 3: 2, 2: 1, 1: None}
    assert validate(t, g) == []
    kids = t.children()
    assert sorted(kids[1]) == [2, 4]


def test_pseudo_tree_small_cases():
    g = nx.Graph()
    g.add_node(1)
    assert pseudo_tree_from_order(g, (1,)).parent == {1: None}
    chain = primal_graph(Hypergraph((1, 2, 3), ({1, 2}, {2, 3})))
    t = pseudo_tree_from_order(chain, (1, 2, 3))
    assert t.parent == {1: 2, 2: 3, 3: None} and t.roots == [3]


def test_pseudo_tree_forest():
    g = primal_graph(Hypergraph((1, 2, 3, 4), ({1, 2}, {3, 4})))
    t = pseudo_tree_from_order(g, (1, 3, 2, 4))
    assert t.roots == [2, 4]
    assert validate(t, g) == []


def test_static_order_from_branchdec():
    b = branchdec_from_shape(H5, FIG1_SHAPE)
    order = static_order_from_branchdec(b)
    assert sorted(order) == [1, 2, 3, 4, 5]
    seen = set()
    for n in b.preorder():
        new = n.label - seen
        assert len(new) <= width_of(b)
        seen |= n.label
    h = hypergraph_of(Formula(4, ((1, 2), (3, 4))))
    b2 = branchdec_from_shape(h, (0, 1))
    assert b2.label(b2.root) == frozenset()
    assert static_order_from_branchdec(b2) == [1, 2, 3, 4]
    assert complete_static_order([3, 1], 4) == [3, 1, 2, 4]


# --------------------------------------------------------------------------
# properties over random hypergraphs

def test_width_sandwich_against_exhaustive_oracles():
    rng = random.Random(11)
    for _ in range(60):
        h = random_hypergraph(rng, max_vertices=7, max_edges=6)
        bw = exhaustive_branch_width(h)
        tw = exhaustive_tree_width(h)
        ew = exhaustive_elimination_width(h)
        assert bw - 1 <= tw == ew <= 2 * bw, h.edge_tuples()


def test_constructors_valid_and_width_inequalities():
    rng = random.Random(12)
    for _ in range(120):
        h = random_hypergraph(rng)
        pi = list(h.vertices)
        rng.shuffle(pi)
        ew = induced_width(h, pi)[0]
        t = treedec_from_order(h, pi)
        b = branchdec_from_order(h, pi)
        assert validate(t, h) == [] and validate(b, h) == []
        assert width_of(t) <= ew
        assert width_of(b) <= ew + 1
        back = order_from_treedec(h, t)
        assert induced_width(h, back)[0] <= width_of(t)
        assert width_of(treedec_from_order(h, back)) <= width_of(t)
        for method in Heuristic:
            hp = heuristic_order(h, method, seed=rng.randint(0, 9))
            assert sorted(hp.order) == list(h.vertices)
            g = primal_graph(h)
            assert validate(pseudo_tree_from_order(g, hp), g) == []


def test_every_tree_shape_bounds_order_width():
    rng = random.Random(13)
    from conftest import all_shapes
    for _ in range(15):
        h = random_hypergraph(rng, max_vertices=6, max_edges=5)
        for shape in itertools.islice(all_shapes(range(len(h.edges))), 200):
            t = treedec_from_shape(h, shape)
            assert induced_width(h, order_from_treedec(h, t))[0] <= width_of(t)
