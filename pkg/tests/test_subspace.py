from itertools import combinations, product

import pytest
from hypothesis import given, settings

from conftest import subspace_pairs, subspaces
from qkleitman.counting import qbinom_product
from qkleitman.subspace import (
    AmbientMismatch,
    CapExceeded,
    Family,
    all_subspaces,
    contains,
    enumerate_subspaces,
    format_family,
    full_space,
    intersect,
    parse_family,
    parse_subspace,
    perp,
    rank_of,
    rref,
    serialize_subspace,
    span,
    subspace_sum,
    sum_dim,
    unit,
    zero_space,
)


def vectors(n, q):
    return [tuple(v) for v in product(range(q), repeat=n)]


def point_set(A):
    return {v for v in vectors(A.n, A.q) if contains(A, v)}


def test_rref_examples():
    assert rref([], 3, 2) == zero_space(3, 2)
    S = rref([(1, 1, 0), (0, 1, 1), (1, 0, 1)], 3, 2)
    assert S.k == 2
    assert S.rows == ((1, 0, 1), (0, 1, 1))
    assert rref([unit(i, 3) for i in range(3)], 3, 2) == full_space(3, 2)


def test_rref_over_gf3_normalises_pivots():
    S = rref([(2, 1, 0), (0, 2, 2)], 3, 3)
    assert S.rows == ((1, 0, 1), (0, 1, 1))


@given(subspaces())
def test_rref_idempotent(S):
    assert rref(S.rows, S.n, S.q) == S
    for row, p in zip(S.rows, S.pivots):
        assert row[p] == 1
        assert all(other[p] == 0 for other in S.rows if other is not row)
    assert list(S.pivots) == sorted(S.pivots)


def test_rref_rejects_wrong_length():
    with pytest.raises(AmbientMismatch):
        rref([(1, 0)], 3, 2)


def test_sum_and_intersect_examples():
    A = span((1, 1, 0))
    B = span((1, 1, 0), (0, 0, 1))
    assert intersect(A, B) == A
    assert subspace_sum(A, B) == B
    e1, e2 = span(unit(0, 3)), span(unit(1, 3))
    assert subspace_sum(e1, e2).k == 2
    assert intersect(e1, e2).k == 0
    assert subspace_sum(A, A) == intersect(A, A) == A


def test_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        intersect(zero_space(3, 2), zero_space(4, 2))
    with pytest.raises(AmbientMismatch):
        subspace_sum(zero_space(3, 2), zero_space(3, 3))
    with pytest.raises(AmbientMismatch):
        contains(zero_space(3, 2), (0, 0))


@pytest.mark.parametrize("q,n", [(2, 3), (3, 2), (4, 2)])
def test_intersection_matches_point_sets(q, n):
    subs = all_subspaces(n, q)
    pts = {S: point_set(S) for S in subs}
    for A in subs:
        assert len(pts[A]) == q**A.k
        for B in subs:
            assert point_set(intersect(A, B)) == pts[A] & pts[B]


def test_contains_examples():
    A = span((1, 1, 0), (0, 0, 1))
    assert contains(A, (0, 0, 0))
    assert contains(A, (1, 1, 1))
    assert not contains(span((1, 1)), (1, 0))
    assert contains(zero_space(4, 3), (0, 0, 0, 0))


def test_perp_examples():
    assert perp(zero_space(3, 2)) == full_space(3, 2)
    assert perp(full_space(3, 5)) == zero_space(3, 5)
    W = span((1, 1))
    assert perp(W) == W


def test_perp_involution_exhaustive_gf3():
    for S in all_subspaces(4, 3):
        P = perp(S)
        assert P.k == 4 - S.k
        assert perp(P) == S


@pytest.mark.parametrize("q,n", [(2, 3), (3, 3), (4, 2)])
def test_perp_by_definition(q, n):
    from qkleitman.subspace import dot

    vs = vectors(n, q)
    for S in all_subspaces(n, q):
        expected = {v for v in vs if all(dot(v, w, q) == 0 for w in S.rows)}
        assert point_set(perp(S)) == expected


@settings(max_examples=200)
@given(subspace_pairs())
def test_dimension_formula_and_duality(pair):
    A, B = pair
    s, m = subspace_sum(A, B), intersect(A, B)
    assert s.k + m.k == A.k + B.k
    assert perp(m) == subspace_sum(perp(A), perp(B))
    assert perp(s) == intersect(perp(A), perp(B))


@pytest.mark.parametrize("n", range(5))
def test_dimension_formula_all_pairs_gf2(n):
    subs = all_subspaces(n, 2)
    for A in subs:
        for B in subs:
            assert subspace_sum(A, B).k + intersect(A, B).k == A.k + B.k


def test_enumeration_examples():
    assert len(list(enumerate_subspaces(3, 1, 2))) == 7
    assert list(enumerate_subspaces(3, 0, 2)) == [zero_space(3, 2)]
    assert len(list(enumerate_subspaces(4, 2, 2))) == 35


@pytest.mark.parametrize("q,n", [(2, 3), (2, 4), (3, 3)])
def test_enumeration_equals_all_spans(q, n):
    # Oracle: the set of spans of every tuple of at most n vectors.
    vs = vectors(n, q)
    spans = set()
    for r in range(n + 1):
        for tup in combinations(vs, r):
            spans.add(rref(tup, n, q))
    enumerated = all_subspaces(n, q)
    assert len(enumerated) == len(set(enumerated))
    assert set(enumerated) == spans


@pytest.mark.parametrize("q", [2, 3, 4])
@pytest.mark.parametrize("n", range(6))
def test_enumeration_count_matches_quotient_formula(q, n):
    if q == 4 and n == 5:
        pytest.skip("slow")
    for k in range(n + 1):
        assert sum(1 for _ in enumerate_subspaces(n, k, q)) == qbinom_product(n, k, q)


def test_enumeration_order_is_canonical():
    layer = list(enumerate_subspaces(4, 2, 3))
    assert layer == sorted(layer, key=lambda S: S.sort_key)
    assert [S.pivots for S in layer[:1]] == [(0, 1)]


def test_enumeration_cap():
    with pytest.raises(CapExceeded) as err:
        enumerate_subspaces(10, 5, 2, cap=1000)
    assert err.value.predicted == qbinom_product(10, 5, 2)


def test_canonical_bytes_identify_subspaces():
    subs = all_subspaces(3, 3)
    assert len({S.canonical_bytes() for S in subs}) == len(subs)
    assert rref([(2, 2, 0)], 3, 3).canonical_bytes() == rref([(1, 1, 0)], 3, 3).canonical_bytes()


@given(subspaces())
def test_serialization_roundtrip(S):
    assert parse_subspace(serialize_subspace(S), S.n, S.q) == S


def test_serialization_format():
    assert serialize_subspace(span((1, 1, 0), (0, 0, 1))) == "110;001"
    assert serialize_subspace(zero_space(3, 2)) == "000"
    with pytest.raises(ValueError):
        parse_subspace("11", 3, 2)


def test_family_slices_and_file_roundtrip():
    F = Family(3, 2, all_subspaces(3, 2)[:9])
    assert sorted(F.supp) == [0, 1, 2]
    assert sum(len(v) for v in F.slices.values()) == len(F) == 9
    text = format_family(F)
    assert text.splitlines()[0] == "2 3"
    assert parse_family(text) == F


def test_family_rejects_foreign_members():
    with pytest.raises(AmbientMismatch):
        Family(3, 2, [zero_space(4, 2)])


@given(subspace_pairs())
def test_sum_dim_point_sets_agree_with_rank(pair):
    A, B = pair
    assert sum_dim(A, B) == rank_of(A.rows + B.rows, A.n, A.q)
    if A.points is not None:
        assert len(A.points) == A.q**A.k
