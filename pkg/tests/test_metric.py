import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import subspace_pairs, subspace_triples, subspaces
from qkleitman.metric import (
    cross_intersecting_check,
    delta,
    diameter,
    family_perp,
    family_stats,
    graph_distance,
    graph_distance_table,
    is_intersecting,
    meet_dim,
    min_window,
    q_hamming_graph,
)
from qkleitman.search import construct_F1, construct_F2
from qkleitman.subspace import (
    AmbientMismatch,
    CapExceeded,
    Family,
    all_subspaces,
    enumerate_subspaces,
    full_space,
    intersect,
    is_subspace_of,
    perp,
    span,
    unit,
    zero_space,
)


def delta_by_definition(A, B):
    return A.k + B.k - 2 * intersect(A, B).k


def test_delta_examples():
    e1, e2 = unit(0, 3), unit(1, 3)
    A = span(e1, n=3)
    assert delta(A, A) == 0
    assert delta(zero_space(5, 3), full_space(5, 3)) == 5
    assert delta(A, span(e2, n=3)) == 2
    with pytest.raises(AmbientMismatch):
        delta(A, zero_space(4, 2))


def test_metric_axioms_exhaustive():
    subs = all_subspaces(3, 2)
    assert len(subs) == 16
    table = {(A, B): delta(A, B) for A in subs for B in subs}
    for A, B in itertools.product(subs, repeat=2):
        assert table[A, B] >= 0
        assert (table[A, B] == 0) == (A == B)
        assert table[A, B] == table[B, A]
        assert table[A, B] == delta_by_definition(A, B)
    for A, B, C in itertools.product(subs, repeat=3):
        assert table[A, C] <= table[A, B] + table[B, C]


@given(subspace_triples())
def test_metric_axioms_random(triple):
    A, B, C = triple
    assert delta(A, B) == delta(B, A) == delta_by_definition(A, B)
    assert (delta(A, B) == 0) == (A == B)
    assert delta(A, C) <= delta(A, B) + delta(B, C)
    assert abs(A.k - B.k) <= delta(A, B)


@pytest.mark.parametrize("q,n", [(2, 1), (2, 2), (2, 3), (2, 4), (3, 2), (3, 3)])
def test_graph_distance_equals_delta(q, n):
    g = q_hamming_graph(n, q)
    table = graph_distance_table(n, q)
    for i, A in enumerate(g.vertices):
        for j, B in enumerate(g.vertices):
            assert table[i][j] == delta(A, B)


def test_graph_edges_are_covering_pairs():
    g = q_hamming_graph(3, 2)
    for i, nbrs in enumerate(g.adjacency):
        A = g.vertices[i]
        for j in nbrs:
            B = g.vertices[j]
            lo, hi = (A, B) if A.k < B.k else (B, A)
            assert hi.k - lo.k == 1 and is_subspace_of(lo, hi)
    A = span(unit(0, 3), n=3)
    assert graph_distance(A, A) == 0
    assert graph_distance(A, span(unit(0, 3), unit(1, 3), n=3)) == 1


def test_graph_distance_cap():
    with pytest.raises(CapExceeded):
        graph_distance(zero_space(8, 3), full_space(8, 3))


def test_isometry_all_pairs():
    subs = all_subspaces(4, 2)
    perps = {A: perp(A) for A in subs}
    for A in subs:
        assert perp(perps[A]) == A
        for B in subs:
            assert delta(perps[A], perps[B]) == delta(A, B)


@given(subspace_pairs())
def test_isometry_random(pair):
    A, B = pair
    assert delta(perp(A), perp(B)) == delta(A, B)


def test_family_stats_examples():
    A = span(unit(0, 4), unit(2, 4), n=4)
    st_ = family_stats(Family(4, 2, [A]))
    assert (st_.diameter, st_.D, st_.supp, st_.mF) == (0, 0, frozenset({2}), 2)
    B = span(unit(0, 4), unit(1, 4), unit(2, 4), n=4)
    st_ = family_stats(Family(4, 2, [B]))
    assert (st_.mF, st_.perp_flag) == (1, True)

    F = construct_F1(3, 1, 2)
    st_ = family_stats(F)
    assert (st_.diameter, st_.D, st_.supp, st_.mF, st_.perp_flag) == (2, 1, frozenset({0, 1}), 0, False)

    e1, e2 = unit(0, 4), unit(1, 4)
    st_ = family_stats(Family(4, 2, [span(e1, n=4), span(e1, e2, n=4)]))
    assert (st_.diameter, st_.D, st_.supp, st_.mF) == (1, 1, frozenset({1, 2}), 1)
    assert st_.mF <= (4 - st_.diameter) / 2

    with pytest.raises(ValueError):
        family_stats(Family(3, 2, []))


def test_min_window():
    assert min_window({2, 3}, 1, 5) == 2
    assert min_window({0, 4}, 3, 5) is None
    assert min_window(set(), 0, 3) == 0


@st.composite
def families(draw, q=2, n=4, max_size=8):
    members = draw(st.lists(subspaces(q=q, n=n), min_size=1, max_size=max_size))
    return Family(n, q, members)


@settings(max_examples=200)
@given(families())
def test_family_invariants(F):
    s = family_stats(F)
    assert s.D <= s.diameter
    assert 2 * s.mF <= F.n - s.diameter
    P = family_perp(F)
    assert len(P) == len(F)
    assert diameter(P) == s.diameter
    assert family_perp(P) == F


@settings(max_examples=200)
@given(families(q=3, n=3, max_size=6))
def test_family_invariants_q3(F):
    s = family_stats(F)
    assert s.D <= s.diameter and 2 * s.mF <= F.n - s.diameter


def test_family_perp_examples():
    assert family_perp(Family(3, 2, [zero_space(3, 2)])) == Family(3, 2, [full_space(3, 2)])


@settings(max_examples=200)
@given(families(max_size=10))
def test_cross_intersecting_holds_under_diameter(F):
    d = diameter(F)
    supp = sorted(F.supp)
    for i in supp:
        for j in supp:
            assert cross_intersecting_check(F, i, j, d)
    for k in supp:
        assert is_intersecting(F.slice(k), k - d // 2)


def test_cross_intersecting_examples():
    F = construct_F1(4, 1, 2)
    assert cross_intersecting_check(F, 1, 1, 2)
    F2 = construct_F2(5, 2, unit(0, 5), 2)
    assert cross_intersecting_check(F2, 3, 3, 5)
    assert is_intersecting(F2.slice(3), 1)
    lines = Family(3, 2, [span(unit(0, 3), n=3), span(unit(1, 3), n=3)])
    assert not cross_intersecting_check(lines, 1, 1, 0)
    with pytest.raises(ValueError, match="dimension 2"):
        cross_intersecting_check(lines, 1, 2, 1)


def test_meet_dim_matches_intersection():
    for A in enumerate_subspaces(4, 2, 2):
        for B in enumerate_subspaces(4, 3, 2):
            assert meet_dim(A, B) == intersect(A, B).k


@settings(max_examples=300)
@given(families(max_size=12))
def test_diameter_matches_pairwise_max(F):
    ms = list(F)
    brute = max((delta(A, B) for A in ms for B in ms), default=0)
    assert diameter(F) == brute


@settings(max_examples=100)
@given(families(q=3, n=3, max_size=10))
def test_diameter_matches_pairwise_max_q3(F):
    ms = list(F)
    assert diameter(F) == max(delta(A, B) for A in ms for B in ms)
