"""Complement-pair bipartite graphs G_k and a constructive perfect matching.

G_k joins a k-space A to an (n-k)-space B when A ∩ B = 0.  Each vertex has
degree q^{k(n-k)}, so Hall's condition holds and a perfect matching exists;
Hopcroft-Karp produces one.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .counting import qbinom
from .subspace import DEFAULT_CAP, CapExceeded, Family, Subspace, enumerate_subspaces, sum_dim


class NoPerfectMatching(RuntimeError):
    pass


@dataclass(frozen=True)
class BipartiteGraph:
    left: tuple[Subspace, ...]
    right: tuple[Subspace, ...]
    adjacency: tuple[tuple[int, ...], ...]

    def right_adjacency(self) -> list[list[int]]:
        radj: list[list[int]] = [[] for _ in self.right]
        for i, nbrs in enumerate(self.adjacency):
            for j in nbrs:
                radj[j].append(i)
        return radj

    def remove_edge(self, i: int, j: int) -> "BipartiteGraph":
        adj = list(self.adjacency)
        adj[i] = tuple(x for x in adj[i] if x != j)
        return BipartiteGraph(self.left, self.right, tuple(adj))


def build_Gk(n: int, k: int, q: int, cap: int = DEFAULT_CAP) -> BipartiteGraph:
    """G_k over GF(q)^n.  For k = n/2 both sides are separate copies of V(k)."""
    if not 0 <= 2 * k <= n:
        raise ValueError(f"need 0 <= k <= n/2, got k={k}, n={n}")
    size = qbinom(n, k, q)
    if 2 * size > cap:
        raise CapExceeded(f"G_{k} over GF({q})^{n}", 2 * size, cap)
    left = tuple(enumerate_subspaces(n, k, q, cap))
    right = tuple(enumerate_subspaces(n, n - k, q, cap))
    # dim A + dim B = n, so A ∩ B = 0 iff A + B is everything.
    adjacency = tuple(tuple(j for j, B in enumerate(right) if sum_dim(A, B) == n) for A in left)
    return BipartiteGraph(left, right, adjacency)


def degrees(g: BipartiteGraph) -> tuple[list[int], list[int]]:
    return [len(a) for a in g.adjacency], [len(a) for a in g.right_adjacency()]


def regularity_check(g: BipartiteGraph, expected: int) -> bool:
    left_deg, right_deg = degrees(g)
    return all(x == expected for x in left_deg) and all(x == expected for x in right_deg)


def hopcroft_karp(adjacency, n_right: int) -> tuple[list[int], list[int]]:
    """Maximum matching; returns (match_left, match_right) with -1 for unmatched.

    Neighbours are tried in the given order, so the result is reproducible.
    """
    n_left = len(adjacency)
    inf = n_left + n_right + 1
    match_l = [-1] * n_left
    match_r = [-1] * n_right
    dist = [0] * n_left

    def bfs() -> bool:
        queue = deque()
        for u in range(n_left):
            if match_l[u] < 0:
                dist[u] = 0
                queue.append(u)
            else:
                dist[u] = inf
        found = False
        while queue:
            u = queue.popleft()
            for v in adjacency[u]:
                w = match_r[v]
                if w < 0:
                    found = True
                elif dist[w] == inf:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        return found

    def dfs(root: int) -> bool:
        # Iterative augmenting-path search along the BFS layers.
        stack = [(root, iter(adjacency[root]))]
        path: list[tuple[int, int]] = []
        while stack:
            u, it = stack[-1]
            advanced = False
            for v in it:
                w = match_r[v]
                if w < 0:
                    path.append((u, v))
                    for a, b in path:
                        match_l[a] = b
                        match_r[b] = a
                    return True
                if dist[w] == dist[u] + 1:
                    path.append((u, v))
                    stack.append((w, iter(adjacency[w])))
                    advanced = True
                    break
            if not advanced:
                dist[u] = inf
                stack.pop()
                if path:
                    path.pop()
        return False

    while bfs():
        for u in range(n_left):
            if match_l[u] < 0:
                dfs(u)
    return match_l, match_r


def perfect_matching(g: BipartiteGraph) -> list[tuple[int, int]]:
    """A perfect matching of a regular bipartite graph as (left, right) index pairs."""
    if len(g.left) != len(g.right):
        raise NoPerfectMatching(f"sides differ in size: {len(g.left)} vs {len(g.right)}")
    left_deg, right_deg = degrees(g)
    if len(set(left_deg) | set(right_deg)) > 1:
        raise NoPerfectMatching("graph is not regular")
    match_l, _ = hopcroft_karp(g.adjacency, len(g.right))
    if any(v < 0 for v in match_l):
        raise NoPerfectMatching(f"only {sum(v >= 0 for v in match_l)} of {len(g.left)} vertices matched")
    return list(enumerate(match_l))


def neighbourhood(g: BipartiteGraph, W) -> set[int]:
    return {j for i in W for j in g.adjacency[i]}


def layer_pair_bound_check(F: Family, d: int, cap: int = DEFAULT_CAP) -> bool:
    """|F(k)| + |F(n-k)| <= [n, k] for every k <= n/2, witnessed by the matchings.

    F may hold at most one endpoint of every matched pair, since matched
    subspaces are at distance n > d.
    """
    n, q = F.n, F.q
    if n != d + 1:
        raise ValueError(f"layer pair check applies to n = d + 1, got n={n}, d={d}")
    for k in range(n // 2 + 1):
        g = build_Gk(n, k, q, cap)
        for i, j in perfect_matching(g):
            if g.left[i] in F and g.right[j] in F:
                return False
        if 2 * k < n:
            assert len(F.slice(k)) + len(F.slice(n - k)) <= qbinom(n, k, q)
        else:
            assert 2 * len(F.slice(k)) <= qbinom(n, k, q)
    return True
