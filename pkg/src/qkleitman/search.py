"""Extremal constructions and exact search for large diameter-bounded families.

The exact search is a maximum-clique branch and bound on the compatibility
graph (vertices: subspaces, edges: pairs at distance <= d).  Candidate sets
are Python ints used as bitsets.  Three prunes are applied:

* dimension window: by the duality isometry some optimal family has all its
  dimensions <= floor((n + d) / 2), so higher-dimensional vertices are dropped;
* per-layer caps: a diameter-<=d family has (k - floor(d/2))-intersecting
  layers, which bounds each layer (also applied to the dual layer n - k);
* greedy colouring of the candidate set.

Results are scheduler independent: the search is split into root subproblems
(clique whose first vertex is v_i), and an incumbent is ranked by
(size, -subproblem index).  The reported family is therefore the first
maximum clique in canonical DFS order, whatever the worker count.
"""

from __future__ import annotations

import hashlib
import json
import logging
import multiprocessing as mp
import os
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .counting import (
    qbinom,
    regime,
    slice_bound,
    slice_hypothesis,
    theorem_bound,
)
from .metric import cross_intersecting_check, delta, diameter
from .subspace import (
    DEFAULT_CAP,
    Family,
    Subspace,
    all_subspaces,
    contains,
    enumerate_subspaces,
    format_family,
    parse_family,
)

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1


class DiameterViolation(ValueError):
    pass


# --- constructions ---------------------------------------------------------


def construct_F1(n: int, t: int, q: int, cap: int = DEFAULT_CAP) -> Family:
    """All subspaces of dimension <= t."""
    if not 0 <= t <= n:
        raise ValueError(f"need 0 <= t <= n, got t={t}, n={n}")
    return Family(n, q, (S for k in range(t + 1) for S in enumerate_subspaces(n, k, q, cap)))


def construct_F2(n: int, t: int, x: Sequence[int], q: int, cap: int = DEFAULT_CAP) -> Family:
    """construct_F1 plus every (t+1)-space through the nonzero vector x."""
    x = tuple(x)
    if len(x) != n:
        raise ValueError(f"vector of length {len(x)} in ambient dimension {n}")
    if not any(x):
        raise ValueError("construct_F2 needs a nonzero vector x")
    if t + 1 > n:
        raise ValueError(f"need t + 1 <= n, got t={t}, n={n}")
    base = construct_F1(n, t, q, cap)
    return base.union(S for S in enumerate_subspaces(n, t + 1, q, cap) if contains(S, x))


def construct_extremal(n: int, d: int, q: int, x: Sequence[int] | None = None, cap: int = DEFAULT_CAP) -> Family:
    """The construction matching the bound: F1 for even d, F2 for odd d."""
    t = d // 2
    if d % 2 == 0:
        return construct_F1(n, min(t, n), q, cap)
    if x is None:
        x = (1,) + (0,) * (n - 1)
    return construct_F2(n, t, x, q, cap)


# --- verification ------------------------------------------------------------


@dataclass
class FamilyReport:
    q: int
    n: int
    d: int
    size: int
    diameter: int
    regime: str
    bound: int
    slice_sizes: dict[int, int]
    slice_caps: dict[int, int]
    violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def tight(self) -> bool:
        return self.passed and self.size == self.bound


def layer_caps(n: int, d: int, q: int) -> dict[int, int]:
    """Sound per-dimension caps for a diameter-<=d family in GF(q)^n."""
    t = d // 2
    caps = {}
    for k in range(n + 1):
        c = qbinom(n, k, q)
        if k - t >= 1 and slice_hypothesis(n, k, t):
            c = min(c, slice_bound(n, k, t, q))
        dual = n - k
        if dual - t >= 1 and slice_hypothesis(n, dual, t):
            c = min(c, slice_bound(n, dual, t, q))
        caps[k] = c
    return caps


def verify_family(F: Family, d: int) -> FamilyReport:
    n, q = F.n, F.q
    diam = diameter(F) if len(F) > 1 else 0
    caps = layer_caps(n, d, q)
    rep = FamilyReport(
        q=q,
        n=n,
        d=d,
        size=len(F),
        diameter=diam,
        regime=regime(n, d),
        bound=theorem_bound(n, d, q),
        slice_sizes={k: len(v) for k, v in sorted(F.slices.items())},
        slice_caps=caps,
    )
    if diam > d:
        rep.violations.append(f"diameter {diam} exceeds {d}")
    supp = sorted(F.supp)
    for k in supp:
        if len(F.slice(k)) > caps[k]:
            rep.violations.append(f"slice {k} has {len(F.slice(k))} members, cap {caps[k]}")
    if diam <= d:
        for a, i in enumerate(supp):
            for j in supp[a:]:
                if not cross_intersecting_check(F, i, j, d):
                    rep.violations.append(f"slices ({i}, {j}) not cross-intersecting enough")
    if rep.regime != "gap" and rep.size > rep.bound:
        rep.violations.append(f"size {rep.size} exceeds bound {rep.bound}")
    return rep


# --- search configuration and results ---------------------------------------


@dataclass
class SearchConfig:
    q: int
    n: int
    d: int
    mode: str = "exact"
    node_budget: int = 10**9
    time_budget: float | None = 3600.0
    checkpoint: str | None = None
    checkpoint_every: int = 10**6
    resume: bool = False
    seed: Family | None = None
    workers: int = 1
    cap: int = DEFAULT_CAP
    use_window: bool = True
    use_layer_caps: bool = True

    def __post_init__(self):
        if self.mode not in ("exact", "greedy"):
            raise ValueError(f"mode must be 'exact' or 'greedy', got {self.mode!r}")
        if self.node_budget <= 0 or (self.time_budget is not None and self.time_budget <= 0):
            raise ValueError("budgets must be positive")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.seed is not None and (self.seed.n, self.seed.q) != (self.n, self.q):
            raise ValueError("seed family lives in a different ambient space")


@dataclass
class SearchResult:
    family: Family
    optimal: bool
    regime: str
    bound: int
    upper_bound: int
    nodes: int = 0
    stop_reason: str | None = None
    checkpoint: str | None = None

    @property
    def size(self) -> int:
        return len(self.family)


def _reverify(F: Family, d: int) -> None:
    if len(F) > 1 and diameter(F) > d:
        raise DiameterViolation(f"family of size {len(F)} has diameter > {d}")


def greedy_family(cfg: SearchConfig) -> SearchResult:
    """Admit subspaces in canonical order while the diameter stays <= d."""
    n, q, d = cfg.n, cfg.q, cfg.d
    chosen: list[Subspace] = []
    if cfg.seed is not None:
        if len(cfg.seed) > 1 and diameter(cfg.seed) > d:
            raise DiameterViolation(f"seed family has diameter {diameter(cfg.seed)} > {d}")
        chosen = list(cfg.seed)
    have = set(chosen)
    for S in all_subspaces(n, q, cfg.cap):
        if S in have:
            continue
        if all(delta(S, T) <= d for T in chosen):
            chosen.append(S)
            have.add(S)
    F = Family(n, q, chosen)
    _reverify(F, d)
    return SearchResult(F, False, regime(n, d), theorem_bound(n, d, q), upper_bound=_trivial_upper(n, d, q))


def _trivial_upper(n: int, d: int, q: int) -> int:
    return sum(layer_caps(n, d, q).values())


# --- compatibility graph and branch and bound ------------------------------


@dataclass
class _Graph:
    vertices: list[Subspace]
    adj: list[int]
    layer_masks: dict[int, int]
    caps: dict[int, int]


def _compat_graph(cfg: SearchConfig) -> _Graph:
    n, q, d = cfg.n, cfg.q, cfg.d
    verts = all_subspaces(n, q, cfg.cap)
    if cfg.use_window and d < n:
        top = (n + d) // 2
        verts = [S for S in verts if S.k <= top]
    N = len(verts)
    adj = [0] * N
    for i in range(N):
        A = verts[i]
        for j in range(i + 1, N):
            B = verts[j]
            if B.k - A.k > d:
                break
            if delta(A, B) <= d:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
    masks: dict[int, int] = {}
    for i, S in enumerate(verts):
        masks[S.k] = masks.get(S.k, 0) | (1 << i)
    if cfg.use_layer_caps:
        caps = layer_caps(n, d, q)
    else:
        caps = {k: qbinom(n, k, q) for k in range(n + 1)}
    return _Graph(verts, adj, masks, {k: caps[k] for k in masks})


class _Stop(Exception):
    pass


class _Solver:
    """Depth-first branch and bound over root subproblems."""

    def __init__(self, g: _Graph, cfg: SearchConfig, shared=None):
        self.g = g
        self.cfg = cfg
        N = len(g.vertices)
        self.N = N
        self.base = N + 2
        self.layers = sorted(g.layer_masks.items())
        self.layer_of = [S.k for S in g.vertices]
        self.nodes = 0
        self.best_key = 0
        self.best_clique: list[int] | None = None
        self.shared = shared  # (mp.Value best_key, lock) or None
        self.deadline = None if cfg.time_budget is None else time.monotonic() + cfg.time_budget
        self.path: list[int] = []
        self.on_tick = None

    # key = size * base + tiebreak; root subproblem i has tiebreak N - i
    def key(self, size: int, sub: int) -> int:
        return size * self.base + (self.N - sub)

    def global_best(self) -> int:
        if self.shared is not None:
            return max(self.best_key, self.shared[0].value)
        return self.best_key

    def offer(self, clique: list[int], sub: int) -> None:
        k = self.key(len(clique), sub)
        if k <= self.global_best():
            return
        self.best_key = k
        self.best_clique = list(clique)
        if self.shared is not None:
            value, lock = self.shared
            with lock:
                if k > value.value:
                    value.value = k

    def layer_bound(self, counts: dict[int, int], P: int) -> int:
        total = 0
        for k, mask in self.layers:
            total += min(self.g.caps[k], counts.get(k, 0) + (P & mask).bit_count())
        return total

    def color_sort(self, P: int) -> tuple[list[int], list[int]]:
        adj = self.g.adj
        order: list[int] = []
        colors: list[int] = []
        U = P
        c = 0
        while U:
            c += 1
            Q = U
            while Q:
                low = Q & -Q
                v = low.bit_length() - 1
                Q &= ~low
                Q &= ~adj[v]
                U &= ~low
                order.append(v)
                colors.append(c)
        return order, colors

    def tick(self) -> None:
        self.nodes += 1
        if self.nodes >= self.cfg.node_budget:
            raise _Stop("node budget")
        if self.nodes & 1023 == 0:
            if self.deadline is not None and time.monotonic() > self.deadline:
                raise _Stop("time budget")
            if self.on_tick is not None:
                self.on_tick(self)

    def solve_sub(self, i: int) -> None:
        """All cliques whose lowest-index vertex is v_i."""
        P = self.g.adj[i] & ~((1 << (i + 1)) - 1)
        counts = {self.layer_of[i]: 1}
        self.path = [i]
        self.offer(self.path, i)
        self.expand(self.path, counts, P, i)

    def expand(self, C: list[int], counts: dict[int, int], P: int, sub: int) -> None:
        self.tick()
        order, colors = self.color_sort(P)
        size = len(C)
        for idx in range(len(order) - 1, -1, -1):
            if self.key(size + colors[idx], sub) <= self.global_best():
                return
            if self.key(self.layer_bound(counts, P), sub) <= self.global_best():
                return
            v = order[idx]
            k = self.layer_of[v]
            C.append(v)
            counts[k] = counts.get(k, 0) + 1
            newP = P & self.g.adj[v]
            if newP:
                self.expand(C, counts, newP, sub)
            else:
                self.offer(C, sub)
            counts[k] -= 1
            C.pop()
            P &= ~(1 << v)


def _root_bound(solver: _Solver, i: int) -> int:
    P = solver.g.adj[i] & ~((1 << (i + 1)) - 1)
    _, colors = solver.color_sort(P)
    col = colors[-1] if colors else 0
    return min(1 + col, solver.layer_bound({solver.layer_of[i]: 1}, P))


# --- checkpoints -------------------------------------------------------------


def _fingerprint(path: list[int]) -> str:
    return hashlib.sha256(",".join(map(str, path)).encode()).hexdigest()[:16]


def write_checkpoint(path: str, cfg: SearchConfig, best: Family, done: list[int], nodes: int, frontier: list[int]) -> None:
    payload = {
        "version": CHECKPOINT_VERSION,
        "q": cfg.q,
        "n": cfg.n,
        "d": cfg.d,
        "window": cfg.use_window,
        "layer_caps": cfg.use_layer_caps,
        "best_size": len(best),
        "best_family": format_family(best),
        "completed": sorted(done),
        "nodes": nodes,
        "frontier": _fingerprint(frontier),
    }
    target = Path(path)
    fd, tmp = tempfile.mkstemp(dir=target.parent or ".", prefix=target.name, suffix=".tmp")
    with os.fdopen(fd, "w") as fh:
        json.dump(payload, fh, indent=1, sort_keys=True)
    os.replace(tmp, target)


def read_checkpoint(path: str, cfg: SearchConfig) -> tuple[Family, set[int], int]:
    data = json.loads(Path(path).read_text())
    if data.get("version") != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version {data.get('version')}")
    for name in ("q", "n", "d"):
        if data[name] != getattr(cfg, name):
            raise ValueError(f"checkpoint {name}={data[name]} does not match run {name}={getattr(cfg, name)}")
    if (data["window"], data["layer_caps"]) != (cfg.use_window, cfg.use_layer_caps):
        raise ValueError("checkpoint was written with different pruning options")
    fam = parse_family(data["best_family"])
    _reverify(fam, cfg.d)
    if len(fam) != data["best_size"]:
        raise ValueError("checkpoint family size does not match recorded size")
    return fam, set(data["completed"]), data["nodes"]


# --- driver ----------------------------------------------------------------


def _worker(g, cfg, shared, counter, todo, out_queue):
    solver = _Solver(g, cfg, shared)
    done, stop = [], None
    try:
        while True:
            with counter.get_lock():
                pos = counter.value
                counter.value += 1
            if pos >= len(todo):
                break
            i = todo[pos]
            if solver.key(_root_bound(solver, i), i) <= solver.global_best():
                done.append(i)
                continue
            solver.solve_sub(i)
            done.append(i)
    except _Stop as exc:
        stop = str(exc)
    out_queue.put((solver.best_key, solver.best_clique, done, solver.nodes, stop))


def max_family_exact(cfg: SearchConfig) -> SearchResult:
    """Maximum diameter-<=d family by branch and bound."""
    n, q, d = cfg.n, cfg.q, cfg.d
    g = _compat_graph(cfg)
    N = len(g.vertices)
    reg = regime(n, d)
    bound = theorem_bound(n, d, q)

    done: set[int] = set()
    nodes_before = 0
    seed = cfg.seed
    if cfg.resume and cfg.checkpoint and Path(cfg.checkpoint).exists():
        seed, done, nodes_before = read_checkpoint(cfg.checkpoint, cfg)
        log.info("resumed from %s: best %d, %d subproblems done", cfg.checkpoint, len(seed), len(done))
    if seed is None:
        seed = greedy_family(SearchConfig(q, n, d, mode="greedy", cap=cfg.cap)).family
    _reverify(seed, d)

    solver = _Solver(g, cfg)
    seed_key = len(seed) * solver.base + (N + 1)  # the seed wins ties
    todo = [i for i in range(N) if i not in done]
    stop = None
    best_key, best_clique = seed_key, None

    def flush(s: _Solver) -> None:
        if cfg.checkpoint and s.nodes % cfg.checkpoint_every < 1024:
            write_checkpoint(cfg.checkpoint, cfg, _current_family(), sorted(done), nodes_before + s.nodes, s.path)

    def _current_family() -> Family:
        if solver.best_clique is not None and solver.best_key > seed_key:
            return Family(n, q, (g.vertices[v] for v in solver.best_clique))
        return seed

    nodes = 0
    if cfg.workers == 1:
        solver.best_key = seed_key
        solver.on_tick = flush
        try:
            for i in todo:
                if solver.key(_root_bound(solver, i), i) <= solver.global_best():
                    done.add(i)
                    continue
                solver.solve_sub(i)
                done.add(i)
        except _Stop as exc:
            stop = str(exc)
        except KeyboardInterrupt:
            stop = "interrupted"
        best_key, best_clique, nodes = solver.best_key, solver.best_clique, solver.nodes
    else:
        ctx = mp.get_context("fork")
        shared = (ctx.Value("q", seed_key, lock=False), ctx.Lock())
        counter = ctx.Value("q", 0)
        out = ctx.Queue()
        procs = [ctx.Process(target=_worker, args=(g, cfg, shared, counter, todo, out)) for _ in range(cfg.workers)]
        for p in procs:
            p.start()
        try:
            results = [out.get() for _ in procs]
        except KeyboardInterrupt:
            for p in procs:
                p.terminate()
            results = []
            stop = "interrupted"
        for p in procs:
            p.join()
        for key, clique, wdone, wnodes, wstop in results:
            done.update(wdone)
            nodes += wnodes
            stop = stop or wstop
            if clique is not None and key > best_key:
                best_key, best_clique = key, clique

    if best_clique is not None and best_key > seed_key:
        family = Family(n, q, (g.vertices[v] for v in best_clique))
    else:
        family = seed
    _reverify(family, d)

    remaining = [i for i in range(N) if i not in done]
    optimal = stop is None and not remaining
    if optimal:
        upper = len(family)
    else:
        upper = max([len(family)] + [_root_bound(solver, i) for i in remaining])
    if cfg.checkpoint:
        write_checkpoint(cfg.checkpoint, cfg, family, sorted(done), nodes_before + nodes, [])
    return SearchResult(
        family=family,
        optimal=optimal,
        regime=reg,
        bound=bound,
        upper_bound=upper,
        nodes=nodes_before + nodes,
        stop_reason=stop,
        checkpoint=cfg.checkpoint,
    )


def run_search(cfg: SearchConfig) -> SearchResult:
    if cfg.mode == "greedy":
        return greedy_family(cfg)
    return max_family_exact(cfg)
