import json

import networkx as nx
import pytest

from qkleitman.counting import qbinom, theorem_bound
from qkleitman.metric import delta, diameter, family_stats
from qkleitman.search import (
    DiameterViolation,
    SearchConfig,
    construct_extremal,
    construct_F1,
    construct_F2,
    greedy_family,
    layer_caps,
    max_family_exact,
    read_checkpoint,
    run_search,
    verify_family,
)
from qkleitman.subspace import Family, contains, all_subspaces, span, unit, zero_space


def clique_oracle(q, n, d):
    subs = all_subspaces(n, q)
    g = nx.Graph()
    g.add_nodes_from(range(len(subs)))
    for i, A in enumerate(subs):
        for j in range(i + 1, len(subs)):
            if delta(A, subs[j]) <= d:
                g.add_edge(i, j)
    return max(len(c) for c in nx.find_cliques(g))


def test_construct_F1_examples():
    F = construct_F1(3, 1, 2)
    assert len(F) == 8 and diameter(F) == 2
    for n in range(4):
        F = construct_F1(n, 0, 3)
        assert list(F) == [zero_space(n, 3)]
    F = construct_F1(5, 2, 2)
    assert len(F) == 1 + 31 + 155 == 187
    assert family_stats(F).diameter == 4


def test_construct_F2_examples():
    F = construct_F2(4, 1, unit(0, 4), 2)
    assert len(F) == 23 == theorem_bound(4, 3, 2)
    assert diameter(F) == 3
    assert all(contains(S, unit(0, 4)) for S in F.slice(2))
    F = construct_F2(5, 1, unit(0, 5), 3)
    assert len(F) == 1 + 121 + 40 == 162
    with pytest.raises(ValueError):
        construct_F2(4, 1, (0, 0, 0, 0), 2)


def test_construct_F2_other_vector():
    x = (1, 1, 0, 1)
    F = construct_F2(4, 1, x, 2)
    assert len(F) == 23 and diameter(F) == 3
    assert construct_extremal(4, 3, 2, x) == F


@pytest.mark.parametrize("q", [2, 3])
@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_tightness(q, d):
    for n in [d + 1] + list(range(2 * d + 1, 2 * d + 3)):
        if sum(qbinom(n, k, q) for k in range(d // 2 + 2)) > 20000:
            continue
        F = construct_extremal(n, d, q)
        rep = verify_family(F, d)
        assert rep.passed, rep.violations
        assert rep.tight
        assert rep.diameter == d


def test_verify_family_failures():
    F = construct_F1(4, 2, 2)
    rep = verify_family(F, 3)
    assert not rep.passed
    assert any("diameter" in v for v in rep.violations)
    rep = verify_family(Family(3, 2, []), 2)
    assert rep.passed and rep.size == 0


def test_layer_caps_sound_for_constructions():
    for q, n, d in [(2, 5, 2), (2, 7, 3), (3, 5, 2), (2, 4, 3)]:
        F = construct_extremal(n, d, q)
        caps = layer_caps(n, d, q)
        for k, members in F.slices.items():
            assert len(members) <= caps[k]


def test_greedy_validity():
    r = greedy_family(SearchConfig(2, 3, 2, mode="greedy", seed=Family(3, 2, [])))
    assert diameter(r.family) <= 2
    r = greedy_family(SearchConfig(2, 4, 2, mode="greedy", seed=construct_F1(4, 1, 2)))
    assert r.size >= 16 and r.regime == "gap"
    r = greedy_family(SearchConfig(2, 5, 2, mode="greedy", seed=construct_F1(5, 1, 2)))
    assert r.size >= 32


def test_greedy_rejects_bad_seed():
    bad = Family(3, 2, [zero_space(3, 2), span(unit(0, 3), unit(1, 3), unit(2, 3), n=3)])
    with pytest.raises(DiameterViolation):
        greedy_family(SearchConfig(2, 3, 1, mode="greedy", seed=bad))


@pytest.mark.parametrize(
    "q,n,d,expected",
    [(2, 2, 1, 2), (2, 3, 2, 8), (3, 3, 2, 14), (2, 4, 3, 23), (2, 3, 1, None), (3, 3, 1, None), (2, 4, 1, None)],
)
def test_exact_search(q, n, d, expected):
    r = max_family_exact(SearchConfig(q, n, d))
    assert r.optimal
    assert diameter(r.family) <= d
    assert r.size == clique_oracle(q, n, d)
    if expected is not None:
        assert r.size == expected == theorem_bound(n, d, q)


def test_exact_search_diameter_zero():
    for q, n in [(2, 3), (3, 2)]:
        r = max_family_exact(SearchConfig(q, n, 0))
        assert r.size == 1 and r.optimal


@pytest.mark.parametrize("q,n,d", [(2, 3, 2), (2, 4, 2), (2, 4, 3), (3, 3, 2)])
def test_pruning_options_agree(q, n, d):
    sizes = set()
    for window in (True, False):
        for caps in (True, False):
            for seed in (None, Family(n, q, [])):
                r = max_family_exact(SearchConfig(q, n, d, use_window=window, use_layer_caps=caps, seed=seed))
                assert r.optimal
                sizes.add(r.size)
    assert len(sizes) == 1


def test_n_greater_than_2d():
    r = max_family_exact(SearchConfig(2, 5, 2))
    assert r.optimal and r.size == 32 == theorem_bound(5, 2, 2) and r.regime == "n>2d"


def test_gap_regime_exploratory():
    r = run_search(SearchConfig(2, 4, 2, seed=construct_F1(4, 1, 2)))
    assert r.regime == "gap"
    assert r.size >= 16 and diameter(r.family) <= 2


def test_budget_truncation():
    r = max_family_exact(SearchConfig(2, 4, 3, node_budget=5, seed=Family(4, 2, []), use_layer_caps=False))
    assert not r.optimal
    assert r.stop_reason == "node budget"
    assert r.upper_bound >= 23
    assert diameter(r.family) <= 3


def test_checkpoint_round_trip(tmp_path):
    path = str(tmp_path / "ck.json")
    cfg = SearchConfig(2, 4, 3, node_budget=50, checkpoint=path, seed=Family(4, 2, []), use_layer_caps=False)
    first = max_family_exact(cfg)
    assert not first.optimal
    data = json.loads(open(path).read())
    assert data["version"] == 1
    fam, done, nodes = read_checkpoint(path, cfg)
    assert fam == first.family and nodes == first.nodes
    resumed = max_family_exact(SearchConfig(2, 4, 3, checkpoint=path, resume=True, use_layer_caps=False))
    assert resumed.optimal and resumed.size == 23
    fresh = max_family_exact(SearchConfig(2, 4, 3, use_layer_caps=False))
    assert fresh.size == resumed.size


def test_checkpoint_mismatch(tmp_path):
    path = str(tmp_path / "ck.json")
    max_family_exact(SearchConfig(2, 3, 2, checkpoint=path))
    with pytest.raises(ValueError, match="d="):
        read_checkpoint(path, SearchConfig(2, 3, 1))


def test_workers_agree():
    for q, n, d in [(2, 4, 3), (2, 4, 2), (3, 3, 2)]:
        a = max_family_exact(SearchConfig(q, n, d, workers=1))
        b = max_family_exact(SearchConfig(q, n, d, workers=4))
        assert (a.size, a.optimal, a.family) == (b.size, b.optimal, b.family)


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(2, 3, 2, mode="annealing")
    with pytest.raises(ValueError):
        SearchConfig(2, 3, 2, node_budget=0)
    with pytest.raises(ValueError):
        SearchConfig(2, 3, 2, seed=Family(4, 2, []))
