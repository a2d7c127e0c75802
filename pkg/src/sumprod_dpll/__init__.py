"""Exact #SAT and sum-of-products solving with DPLL and component caching.

The package also ships the structure-guided baselines (variable elimination,
recursive conditioning, AND/OR search), width tools for hypergraphs and
benchmark generators.
"""

from .counters import (choose_variable, count_component_cache, count_component_space,
                       count_dpll, count_simple_cache, sat_dpll)
from .decomposition import (BranchDecomp, ElimOrder, Heuristic, Hypergraph, PseudoTree,
                            TreeDecomp, branchdec_from_order, heuristic_order, hypergraph_of,
                            induced_width, order_from_treedec, primal_graph,
                            pseudo_tree_from_order, static_order_from_branchdec,
                            treedec_from_order, validate, width_of)
from .formula import (Assignment, Component, Formula, brute_force_count,
                      brute_force_probability, canonical_key, probability_to_count, reduce,
                      to_components, unit_propagate)
from .generators import gen_blocks, gen_pearls, gen_random
from .reference import Mode, ao_solve, compute_ao_labels, early_zero_cutoff, rc_solve, ve_solve
from .search import CacheStore, OrderPolicy, SearchStats
from .semiring import (BOOLEAN, COUNTING, MAX_PRODUCT, MAX_SUM, SUM_PRODUCT, Factor,
                       SemiringInstance, SemiringSpec, brute_force_sumprod,
                       encode_cnf_as_instance, sumprod_dpll_cache)

__all__ = [
    "choose_variable",
    "count_component_cache",
    "count_component_space",
    "count_dpll",
    "count_simple_cache",
    "sat_dpll",
    "BranchDecomp",
    "ElimOrder",
    "Heuristic",
    "Hypergraph",
    "PseudoTree",
    "TreeDecomp",
    "branchdec_from_order",
    "heuristic_order",
    "hypergraph_of",
    "induced_width",
    "order_from_treedec",
    "primal_graph",
    "pseudo_tree_from_order",
    "static_order_from_branchdec",
    "treedec_from_order",
    "validate",
    "width_of",
    "Assignment",
    "Component",
    "Formula",
    "brute_force_count",
    "brute_force_probability",
    "canonical_key",
    "probability_to_count",
    "reduce",
    "to_components",
    "unit_propagate",
    "gen_blocks",
    "gen_pearls",
    "gen_random",
    "Mode",
    "ao_solve",
    "compute_ao_labels",
    "early_zero_cutoff",
    "rc_solve",
    "ve_solve",
    "CacheStore",
    "OrderPolicy",
    "SearchStats",
    "BOOLEAN",
    "COUNTING",
    "MAX_PRODUCT",
    "MAX_SUM",
    "SUM_PRODUCT",
    "Factor",
    "SemiringInstance",
    "SemiringSpec",
    "brute_force_sumprod",
    "encode_cnf_as_instance",
    "sumprod_dpll_cache",
]

__version__ = "0.1.0"
