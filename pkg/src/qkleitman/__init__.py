"""Exact tools for the q-analogue of Kleitman's isodiametric inequality."""

from .counting import (
    intersection_count,
    layer_bound_audit,
    qbinom,
    regime,
    theorem_bound,
)
from .gf import FieldSpec, field_make
from .metric import delta, family_perp, family_stats, graph_distance
from .search import (
    SearchConfig,
    SearchResult,
    construct_F1,
    construct_F2,
    greedy_family,
    max_family_exact,
    verify_family,
)
from .subspace import Family, Subspace, enumerate_subspaces, intersect, perp, rref

__version__ = "0.1.0"
