"""The subspace distance, the q-Hamming graph distance, and family statistics."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, product

from .gf import field_make
from .subspace import (
    CapExceeded,
    Family,
    Subspace,
    _check_same,
    all_subspaces,
    perp,
    reduce_rows,
    sum_dim,
    total_count,
)

GRAPH_CAP = 100_000


def delta(A: Subspace, B: Subspace) -> int:
    """dim A + dim B - 2 dim(A ∩ B), computed as 2 dim(A + B) - dim A - dim B."""
    _check_same(A, B)
    return 2 * sum_dim(A, B) - A.k - B.k


def meet_dim(A: Subspace, B: Subspace) -> int:
    return A.k + B.k - sum_dim(A, B)


# --- q-Hamming graph ---------------------------------------------------------


@dataclass(frozen=True)
class HammingGraph:
    vertices: tuple[Subspace, ...]
    index: dict
    adjacency: tuple[tuple[int, ...], ...]


@lru_cache(maxsize=8)
def q_hamming_graph(n: int, q: int, cap: int = GRAPH_CAP) -> HammingGraph:
    """Materialize the covering graph of the subspace lattice of GF(q)^n."""
    predicted = total_count(n, q)
    if predicted > cap:
        raise CapExceeded(f"q-Hamming graph of GF({q})^{n}", predicted, cap)
    verts = all_subspaces(n, q, cap)
    index = {S: i for i, S in enumerate(verts)}
    adj: list[set[int]] = [set() for _ in verts]
    for B in verts:
        if B.k == 0:
            continue
        for A in _hyperplanes(B):
            i, j = index[A], index[B]
            adj[i].add(j)
            adj[j].add(i)
    return HammingGraph(tuple(verts), index, tuple(tuple(sorted(a)) for a in adj))


def _hyperplanes(B: Subspace) -> set[Subspace]:
    """All codimension-1 subspaces of B: kernels of nonzero functionals on B's coordinates."""
    F = field_make(B.q)
    out = set()
    k = B.k
    for coeffs in product(range(B.q), repeat=k):
        if not any(coeffs):
            continue
        # kernel of x -> sum c_i x_i on coordinates w.r.t. the rows of B
        piv = next(i for i, c in enumerate(coeffs) if c)
        inv_c = F.inv(coeffs[piv])
        gens = []
        for i in range(k):
            if i == piv:
                continue
            # e_i - (c_i / c_piv) e_piv lies in the kernel
            f = F.mul(F.neg(coeffs[i]), inv_c)
            gens.append(
                tuple(F.add(a, F.mul(f, b)) for a, b in zip(B.rows[i], B.rows[piv]))
            )
        out.add(Subspace(B.q, B.n, reduce_rows(gens, B.n, B.q)))
    return out


def _bfs(g: HammingGraph, src: int) -> list[int]:
    dist = [-1] * len(g.vertices)
    dist[src] = 0
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in g.adjacency[u]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def graph_distance(A: Subspace, B: Subspace, cap: int = GRAPH_CAP) -> int:
    """Shortest-path length between A and B in the q-Hamming graph (test oracle)."""
    _check_same(A, B)
    g = q_hamming_graph(A.n, A.q, cap)
    return _bfs(g, g.index[A])[g.index[B]]


def graph_distance_table(n: int, q: int, cap: int = GRAPH_CAP) -> list[list[int]]:
    g = q_hamming_graph(n, q, cap)
    return [_bfs(g, i) for i in range(len(g.vertices))]


# --- family statistics -------------------------------------------------------


@dataclass(frozen=True)
class FamilyStats:
    diameter: int
    D: int
    supp: frozenset[int]
    mF: int
    perp_flag: bool


def _slice_pair_max(i: int, j: int, n: int) -> int:
    # Two subspaces of dims i, j meet in at least max(0, i + j - n) dimensions.
    return i + j - 2 * max(0, i + j - n)


def diameter(F: Family) -> int:
    """Largest pairwise distance.

    Slice pairs are scanned by their largest possible distance, so the scan
    stops as soon as no remaining pair can beat the current maximum.
    """
    slices = F.slices
    dims = sorted(slices)
    pairs = [(i, j) for a, i in enumerate(dims) for j in dims[a:] if i != j or len(slices[i]) > 1]
    pairs.sort(key=lambda p: (-_slice_pair_max(p[0], p[1], F.n), p))
    best = 0
    for i, j in pairs:
        top = _slice_pair_max(i, j, F.n)
        if top <= best:
            break
        left, right = slices[i], slices[j]
        for a, A in enumerate(left):
            for B in (right[a + 1 :] if i == j else right):
                dd = delta(A, B)
                if dd > best:
                    best = dd
                    if best == top:
                        break
            if best == top:
                break
    return best


def min_window(supp, d: int, n: int) -> int | None:
    """min x in [0, n] with supp inside [x, x + d]; None if no such x."""
    for x in range(n + 1):
        if all(x <= k <= x + d for k in supp):
            return x
    return None


def family_stats(F: Family) -> FamilyStats:
    if len(F) == 0:
        raise ValueError("family_stats needs a nonempty family")
    d = diameter(F)
    supp = F.supp
    D = max(supp) - min(supp)
    perp_supp = {F.n - k for k in supp}
    # The F branch wins ties.
    for x in range(F.n + 1):
        if all(x <= k <= x + d for k in supp):
            return FamilyStats(d, D, supp, x, False)
        if all(x <= k <= x + d for k in perp_supp):
            return FamilyStats(d, D, supp, x, True)
    raise AssertionError("window scan found no x")  # pragma: no cover


def family_perp(F: Family) -> Family:
    return Family(F.n, F.q, (perp(W) for W in F))


def cross_intersecting_check(F: Family, i: int, j: int, d: int) -> bool:
    """Every A in F(i), B in F(j) has dim(A ∩ B) >= ceil((i + j - d) / 2)."""
    for dim in (i, j):
        if not F.slice(dim):
            raise ValueError(f"family has no members of dimension {dim}")
    s = -((d - i - j) // 2)
    if s <= 0:
        return True
    return all(meet_dim(A, B) >= s for A in F.slice(i) for B in F.slice(j))


def is_intersecting(members, s: int) -> bool:
    """All pairs (including a member with itself) meet in dimension >= s."""
    ms = list(members)
    return all(A.k >= s for A in ms) and all(meet_dim(A, B) >= s for A, B in combinations(ms, 2))

