"""Command-line entry point.

Every command builds a :class:`RunReport`.  With ``--json`` the report is
printed as a JSON envelope; otherwise the command's primary artifact (CSV
table, family file, pairing) goes to stdout and a summary to stderr.
Numbers inside reports are decimal strings (fractions as ``num/den``) so
nothing is rounded on the way through JSON.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import counting
from .counting import (
    intersection_count,
    is_covered,
    layer_bound_audit,
    partition_audit,
    product_audit,
    qbinom,
    regime,
    theorem_bound,
)
from .gf import SUPPORTED_ORDERS, FieldError, field_make
from .matching import (
    build_Gk,
    neighbourhood,
    perfect_matching,
    regularity_check,
)
from .metric import (
    cross_intersecting_check,
    delta,
    family_perp,
    family_stats,
    graph_distance_table,
    q_hamming_graph,
    GRAPH_CAP,
)
from .search import (
    SearchConfig,
    construct_extremal,
    run_search,
    verify_family,
)
from .subspace import (
    DEFAULT_CAP,
    CapExceeded,
    Family,
    all_subspaces,
    enumerate_subspaces,
    format_family,
    intersect,
    parse_family,
    perp,
    rref,
    serialize_subspace,
    subspace_sum,
    total_count,
)

PASS, FAIL, EXPLORATORY = "pass", "fail", "exploratory"
PAIR_LIMIT = 250_000


def render(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return str(v)


@dataclass
class RunReport:
    command: str
    params: dict
    outcome: str = PASS
    values: dict[str, str] = field(default_factory=dict)
    regime: str | None = None
    violations: list[str] = field(default_factory=list)
    artifacts: list[str] = field(default_factory=list)
    runtime_ms: int = 0
    sidecar: dict = field(default_factory=dict)

    def put(self, name: str, value) -> None:
        self.values[name] = render(value)

    def check(self, name: str, ok: bool) -> bool:
        if not ok:
            self.violations.append(name)
            self.outcome = FAIL
        return ok

    def envelope(self) -> dict:
        return {
            "command": self.command,
            "params": {k: render(v) for k, v in self.params.items()},
            "outcome": self.outcome,
            "values": self.values,
            "regime": self.regime,
            "violations": self.violations,
            "artifacts": self.artifacts,
            "runtime_ms": self.runtime_ms,
            "sidecar": self.sidecar,
        }

    def summary(self) -> str:
        lines = [f"{self.command}: {self.outcome}" + (f" [{self.regime}]" if self.regime else "")]
        lines += [f"  {k} = {v}" for k, v in self.values.items()]
        lines += [f"  VIOLATION {v}" for v in self.violations]
        return "\n".join(lines)


# --- table -------------------------------------------------------------------


def cmd_table(args) -> tuple[RunReport, str]:
    q, nmax = args.q, args.nmax
    rep = RunReport("table", {"q": q, "nmax": nmax})
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\r\n")
    w.writerow([f"k={k}" for k in range(nmax + 1)])
    for n in range(nmax + 1):
        row = [qbinom(n, k, q) for k in range(nmax + 1)]
        w.writerow(row)
        for k in range(n + 1):
            rep.put(f"qbinom({n},{k})", row[k])
    return rep, buf.getvalue()


# --- verify suites -----------------------------------------------------------


def _pairs(items, rng, limit=PAIR_LIMIT):
    """All ordered pairs if few enough, else a reproducible sample."""
    N = len(items)
    if N * N <= limit:
        return [(a, b) for a in items for b in items], True
    return [(rng.choice(items), rng.choice(items)) for _ in range(limit)], False


def suite_gf(rep: RunReport, q: int, n: int, rng, cap: int) -> None:
    F = field_make(q)
    els = list(F.elements())
    ok = True
    for a in els:
        ok &= F.add(a, 0) == a and F.mul(a, 1) == a and F.add(a, F.neg(a)) == 0
        if a:
            ok &= F.mul(a, F.inv(a)) == 1
        for b in els:
            ok &= F.add(a, b) == F.add(b, a) and F.mul(a, b) == F.mul(b, a)
            for c in els:
                ok &= F.mul(a, F.add(b, c)) == F.add(F.mul(a, b), F.mul(a, c))
                ok &= F.add(F.add(a, b), c) == F.add(a, F.add(b, c))
                ok &= F.mul(F.mul(a, b), c) == F.mul(a, F.mul(b, c))
    rep.check("gf.axioms", ok)
    rep.check("gf.cyclic_group", F.order_of(F.generator()) == q - 1)
    rep.put("gf.triples", q**3)


def suite_subspace(rep: RunReport, q: int, n: int, rng, cap: int) -> None:
    verts = all_subspaces(n, q, cap)
    for k in range(n + 1):
        rep.check(f"subspace.count[k={k}]", sum(1 for S in verts if S.k == k) == qbinom(n, k, q))
    pairs, exhaustive = _pairs(verts, rng)
    ok_dim = ok_demorgan = True
    for A, B in pairs:
        s, m = subspace_sum(A, B), intersect(A, B)
        ok_dim &= s.k + m.k == A.k + B.k
        ok_demorgan &= perp(m) == subspace_sum(perp(A), perp(B))
    rep.check("subspace.dimension_formula", ok_dim)
    rep.check("subspace.perp_duality", ok_demorgan)
    rep.check("subspace.rref_idempotent", all(rref(S.rows, n, q) == S for S in verts))
    rep.check("subspace.perp_involution", all(perp(perp(S)) == S for S in verts))
    rep.put("subspace.pair_checks", len(pairs))
    rep.put("subspace.exhaustive", exhaustive)


def suite_counting(rep: RunReport, q: int, n: int, rng, cap: int) -> None:
    total_all(n, q, cap)
    layers = {k: list(enumerate_subspaces(n, k, q, cap)) for k in range(n + 1)}
    checks = 0
    ok = True
    for k in range(n + 1):
        anchors = layers[k] if len(layers[k]) * total_count(n, q) <= PAIR_LIMIT else rng.sample(layers[k], 3)
        for A in anchors:
            for l in range(n + 1):
                tally: dict[int, int] = {}
                for B in layers[l]:
                    j = A.k + B.k - subspace_sum(A, B).k
                    tally[j] = tally.get(j, 0) + 1
                for j in range(min(k, l) + 1):
                    ok &= tally.get(j, 0) == intersection_count(n, k, l, j, q)
                    checks += 1
    rep.check("counting.intersection_vs_enumeration", ok)
    rep.check(
        "counting.total_probability",
        all(
            sum(intersection_count(n, k, l, j, q) for j in range(min(k, l) + 1)) == qbinom(n, l, q)
            for k in range(n + 1)
            for l in range(n + 1)
        ),
    )
    rep.check("counting.qbinom_vs_product", all(qbinom(n, k, q) == counting.qbinom_product(n, k, q) for k in range(n + 1)))
    rep.put("counting.checks", checks)


def total_all(n: int, q: int, cap: int) -> int:
    total = total_count(n, q)
    if total > cap:
        raise CapExceeded(f"all subspaces of GF({q})^{n}", total, cap)
    return total


def suite_metric(rep: RunReport, q: int, n: int, rng, cap: int) -> None:
    verts = all_subspaces(n, q, cap)
    idx = {S: i for i, S in enumerate(verts)}
    pairs, exhaustive = _pairs(verts, rng)
    dist: dict[tuple[int, int], int] = {}
    ok_axioms = ok_iso = True
    for A, B in pairs:
        dd = delta(A, B)
        dist[idx[A], idx[B]] = dd
        ok_axioms &= dd >= 0 and (dd == 0) == (A == B) and dd == delta(B, A)
        ok_axioms &= dd == A.k + B.k - 2 * intersect(A, B).k
        ok_iso &= delta(perp(A), perp(B)) == dd
    rep.check("metric.axioms", ok_axioms)
    rep.check("metric.isometry", ok_iso)
    rep.put("metric.pair_checks", len(pairs))
    rep.put("metric.exhaustive", exhaustive)

    N = len(verts)
    ok_tri = True
    if exhaustive and N**3 <= 8 * PAIR_LIMIT:
        for a in range(N):
            for b in range(N):
                dab = dist[a, b]
                for c in range(N):
                    ok_tri &= dist[a, c] <= dab + dist[b, c]
        rep.put("metric.triangle_triples", N**3)
    else:
        for _ in range(PAIR_LIMIT // 4):
            A, B, C = rng.choice(verts), rng.choice(verts), rng.choice(verts)
            ok_tri &= delta(A, C) <= delta(A, B) + delta(B, C)
        rep.put("metric.triangle_triples", PAIR_LIMIT // 4)
    rep.check("metric.triangle", ok_tri)

    if N <= GRAPH_CAP and N * N <= 4 * PAIR_LIMIT:
        table = graph_distance_table(n, q)
        g = q_hamming_graph(n, q)
        ok_graph = all(table[g.index[A]][g.index[B]] == delta(A, B) for A in verts for B in verts)
        rep.check("metric.graph_distance", ok_graph)
        rep.put("metric.graph_pairs", N * N)

    ok_window = ok_cross = True
    fams = 0
    for _ in range(50):
        size = rng.randint(1, min(N, 12))
        F = Family(n, q, rng.sample(verts, size))
        st = family_stats(F)
        d = st.diameter
        ok_window &= 2 * st.mF <= n - d and st.D <= d
        for i in F.supp:
            for j in F.supp:
                ok_cross &= cross_intersecting_check(F, i, j, d)
        ok_iso &= family_stats(family_perp(F)).diameter == d
        fams += 1
    rep.check("metric.min_window", ok_window)
    rep.check("metric.cross_intersecting", ok_cross)
    rep.check("metric.family_isometry", ok_iso)
    rep.put("metric.random_families", fams)


def suite_matching(rep: RunReport, q: int, n: int, rng, cap: int) -> None:
    total_all(n, q, cap)
    for k in range(n // 2 + 1):
        g = build_Gk(n, k, q, cap)
        deg = q ** (k * (n - k))
        rep.check(f"matching.regular[k={k}]", regularity_check(g, deg))
        rep.check(f"matching.degree_formula[k={k}]", deg == intersection_count(n, k, n - k, 0, q))
        pairs = perfect_matching(g)
        rep.check(f"matching.perfect[k={k}]", len(pairs) == len(g.left))
        rep.check(
            f"matching.pair_distance[k={k}]",
            all(delta(g.left[i], g.right[j]) == n for i, j in pairs),
        )
        hall = True
        for _ in range(20):
            W = rng.sample(range(len(g.left)), rng.randint(1, len(g.left)))
            hall &= len(neighbourhood(g, W)) >= len(W)
        rep.check(f"matching.hall[k={k}]", hall)
        rep.put(f"matching.pairs[k={k}]", len(pairs))


SUITES = {
    "gf": suite_gf,
    "subspace": suite_subspace,
    "counting": suite_counting,
    "metric": suite_metric,
    "matching": suite_matching,
}


def cmd_verify(args) -> RunReport:
    q, n = args.q, args.n
    names = list(SUITES) if args.suite == "all" else [args.suite]
    rep = RunReport("verify", {"q": q, "n": n, "suite": args.suite, "seed": args.seed})
    field_make(q)
    rng = random.Random(args.seed)
    for name in names:
        if name != "gf":
            predicted = total_count(n, q)
            if predicted > args.cap:
                raise CapExceeded(f"suite {name!r} over GF({q})^{n}", predicted, args.cap)
        SUITES[name](rep, q, n, rng, args.cap)
    return rep


# --- bound / audit -----------------------------------------------------------


def cmd_bound(args) -> RunReport:
    q, n, d = args.q, args.n, args.d
    rep = RunReport("bound", {"q": q, "n": n, "d": d}, regime=regime(n, d))
    t = d // 2
    rep.put("bound", theorem_bound(n, d, q))
    rep.put("t", t)
    rep.put("ball", sum(qbinom(n, i, q) for i in range(min(t, n) + 1)))
    if d % 2 and n > d:
        rep.put("extra_layer", qbinom(n - 1, t, q))
    if rep.regime == counting.GAP:
        rep.outcome = EXPLORATORY
    return rep


def cmd_audit(args) -> RunReport:
    q, n, d = args.q, args.n, args.d
    rep = RunReport("audit", {"q": q, "n": n, "d": d, "kmax": args.kmax}, regime=regime(n, d))
    br = layer_bound_audit(n, d, q)
    rep.put("bound", br.bound)
    rep.put("t", br.t)
    for name, value in br.audit.items():
        rep.put(name, value)
    for name, ok in br.checks.items():
        rep.check(f"audit.{name}", ok)
    for msg in br.hypothesis_violations:
        rep.violations.append(f"audit.hypothesis: {msg}")
    rows = partition_audit(args.kmax)
    rep.put(f"p({args.kmax})", rows[-1][1])
    rep.check("audit.partition_growth", all(h for _, _, h in rows))
    rep.put(f"product({br.t})", product_audit(br.t))
    rep.put("product(2)", product_audit(2))
    cert = counting.euler_product_certificate(args.kmax)
    rep.put("f_half_partial", cert["f_half_partial"])
    rep.check("audit.f_half_partial", bool(cert["f_half_partial_le_geometric_partial"]))
    return rep


# --- construct / search / matching --------------------------------------------


def _write(path: str | None, text: str, rep: RunReport) -> None:
    if path:
        Path(path).write_text(text)
        rep.artifacts.append(path)


def cmd_construct(args) -> tuple[RunReport, str]:
    q, n, d = args.q, args.n, args.d
    x = tuple(int(c) for c in args.x) if args.x else None
    rep = RunReport("construct", {"q": q, "n": n, "d": d, "x": args.x or ""}, regime=regime(n, d))
    F = construct_extremal(n, d, q, x, args.cap)
    fr = verify_family(F, d)
    text = format_family(F)
    rep.put("kind", "F1" if d % 2 == 0 else "F2")
    rep.put("size", fr.size)
    rep.put("diameter", fr.diameter)
    rep.put("bound", fr.bound)
    for v in fr.violations:
        rep.check(f"construct.{v}", False)
    if is_covered(n, d):
        rep.check("construct.size_equals_bound", fr.size == fr.bound)
        rep.check("construct.diameter_equals_d", fr.diameter == d)
    elif rep.regime == counting.GAP and rep.outcome == PASS:
        rep.outcome = EXPLORATORY
    _write(args.out, text, rep)
    return rep, text


def _search_outcome(rep: RunReport, res) -> None:
    if res.regime in (counting.COVERED_SMALL, counting.COVERED_LARGE, counting.TRIVIAL):
        rep.check("search.size_le_bound", res.size <= res.bound)
        if res.optimal:
            rep.check("search.optimum_equals_bound", res.size == res.bound)
        elif rep.outcome == PASS:
            rep.outcome = EXPLORATORY
    elif rep.outcome == PASS:
        rep.outcome = EXPLORATORY


def cmd_search(args) -> tuple[RunReport, str]:
    q, n, d = args.q, args.n, args.d
    seed = parse_family(Path(args.seed_family).read_text()) if args.seed_family else None
    cfg = SearchConfig(
        q=q,
        n=n,
        d=d,
        mode=args.mode,
        node_budget=args.node_budget,
        time_budget=args.time_budget,
        checkpoint=args.checkpoint,
        resume=args.resume,
        seed=seed,
        workers=args.workers,
        cap=args.cap,
        use_window=not args.no_window,
        use_layer_caps=not args.no_layer_caps,
    )
    params = {"q": q, "n": n, "d": d, "mode": args.mode, "window": cfg.use_window, "layer_caps": cfg.use_layer_caps}
    if args.seed_family:
        params["seed_family"] = args.seed_family
    rep = RunReport("search", params)
    res = run_search(cfg)
    rep.regime = "gap/exploratory" if res.regime == counting.GAP else res.regime
    rep.put("best", res.size)
    rep.put("optimal", res.optimal)
    rep.put("bound", res.bound)
    rep.put("upper_bound", res.upper_bound)
    rep.put("slices", ",".join(f"{k}:{len(v)}" for k, v in sorted(res.family.slices.items())))
    rep.sidecar["nodes"] = res.nodes
    if res.stop_reason:
        rep.sidecar["stop_reason"] = res.stop_reason
    fr = verify_family(res.family, d)
    rep.check("search.soundness", fr.diameter <= d)
    _search_outcome(rep, res)
    text = format_family(res.family)
    _write(args.out, text, rep)
    if res.checkpoint:
        rep.artifacts.append(res.checkpoint)
    return rep, text


def cmd_matching(args) -> tuple[RunReport, str]:
    q, n, k = args.q, args.n, args.k
    rep = RunReport("matching", {"q": q, "n": n, "k": k})
    g = build_Gk(n, k, q, args.cap)
    deg = q ** (k * (n - k))
    rep.put("degree", deg)
    rep.put("vertices_per_side", len(g.left))
    rep.check("matching.regular", regularity_check(g, deg))
    pairs = perfect_matching(g)
    rep.put("pairs", len(pairs))
    rep.check("matching.pair_distance", all(delta(g.left[i], g.right[j]) == n for i, j in pairs))
    text = "".join(f"{serialize_subspace(g.left[i])} ; {serialize_subspace(g.right[j])}\n" for i, j in pairs)
    _write(args.out, text, rep)
    return rep, text


# --- argument parsing -----------------------------------------------------------


def _order(s: str) -> int:
    q = int(s)
    if q not in SUPPORTED_ORDERS:
        raise argparse.ArgumentTypeError(f"unsupported order {q}; choose from {SUPPORTED_ORDERS}")
    return q


def _nonneg(s: str) -> int:
    v = int(s)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {s}")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report envelope")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help="enumeration cap (default 5e6)")
    common.add_argument("--workers", type=int, default=1, help="worker processes for the exact search")

    p = argparse.ArgumentParser(prog="qkleitman", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("table", parents=[common], help="Gaussian binomial table as CSV")
    s.add_argument("--q", type=_order, required=True)
    s.add_argument("--nmax", type=_nonneg, required=True)

    s = sub.add_parser("verify", parents=[common], help="run property suites")
    s.add_argument("--q", type=_order, required=True)
    s.add_argument("--n", type=_nonneg, required=True)
    s.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    s.add_argument("--seed", type=int, default=0)

    for name, help_ in (("bound", "maximum family size and regime"), ("audit", "exact audit of the d >= 4 argument")):
        s = sub.add_parser(name, parents=[common], help=help_)
        s.add_argument("--q", type=_order, required=True)
        s.add_argument("--n", type=_nonneg, required=True)
        s.add_argument("--d", type=_nonneg, required=True)
        if name == "audit":
            s.add_argument("--kmax", type=int, default=40)

    s = sub.add_parser("construct", parents=[common], help="extremal family file")
    s.add_argument("--q", type=_order, required=True)
    s.add_argument("--n", type=_nonneg, required=True)
    s.add_argument("--d", type=_nonneg, required=True)
    s.add_argument("--x", help="nonzero vector for odd d, as base-q digits (default e1)")
    s.add_argument("--out")

    s = sub.add_parser("search", parents=[common], help="maximum diameter-bounded family")
    s.add_argument("--q", type=_order, required=True)
    s.add_argument("--n", type=_nonneg, required=True)
    s.add_argument("--d", type=_nonneg, required=True)
    s.add_argument("--mode", choices=["exact", "greedy"], default="exact")
    s.add_argument("--node-budget", type=int, default=10**9)
    s.add_argument("--time-budget", type=float, default=3600.0)
    s.add_argument("--checkpoint")
    s.add_argument("--resume", action="store_true")
    s.add_argument("--seed-family")
    s.add_argument("--no-window", action="store_true", help="keep dimensions above (n+d)/2")
    s.add_argument("--no-layer-caps", action="store_true", help="colouring bound only")
    s.add_argument("--out")

    s = sub.add_parser("matching", parents=[common], help="perfect matching of G_k")
    s.add_argument("--q", type=_order, required=True)
    s.add_argument("--n", type=_nonneg, required=True)
    s.add_argument("--k", type=_nonneg, required=True)
    s.add_argument("--out")
    return p


COMMANDS = {
    "table": cmd_table,
    "verify": cmd_verify,
    "bound": cmd_bound,
    "audit": cmd_audit,
    "construct": cmd_construct,
    "search": cmd_search,
    "matching": cmd_matching,
}


def run(args: argparse.Namespace) -> tuple[RunReport, str | None]:
    t0 = time.perf_counter()
    out = COMMANDS[args.command](args)
    rep, text = out if isinstance(out, tuple) else (out, None)
    rep.runtime_ms = int((time.perf_counter() - t0) * 1000)
    return rep, text


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rep, text = run(args)
    except (CapExceeded, FieldError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    if args.json:
        print(json.dumps(rep.envelope(), indent=2, sort_keys=True))
    else:
        if text is not None:
            sys.stdout.write(text)
        print(rep.summary(), file=sys.stderr)
    return 0 if rep.outcome in (PASS, EXPLORATORY) else 1


if __name__ == "__main__":
    sys.exit(main())
