"""Exact counting formulas, bound formulas and inequality audits.

Everything here is integer or :class:`fractions.Fraction` arithmetic.  The
inequalities being audited are strict and some are close to tight for q = 2,
so no floating point is used anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

# Regime labels for (n, d).
COVERED_SMALL = "n=d+1"
COVERED_LARGE = "n>2d"
GAP = "gap"
TRIVIAL = "trivial"


class RegimeError(ValueError):
    pass


# --- Gaussian binomials ----------------------------------------------------


@lru_cache(maxsize=None)
def _qpascal_row(n: int, q: int) -> tuple[int, ...]:
    if n == 0:
        return (1,)
    prev = _qpascal_row(n - 1, q)
    # [n, k] = [n-1, k-1] + q^k [n-1, k]
    row = [1]
    for k in range(1, n):
        row.append(prev[k - 1] + q**k * prev[k])
    row.append(1)
    return tuple(row)


def qbinom(n: int, k: int, q: int) -> int:
    """Number of k-dimensional subspaces of F_q^n (0 outside 0 <= k <= n)."""
    if n < 0 or k < 0 or k > n:
        return 0
    if n > 200:
        return qbinom_product(n, k, q)
    return _qpascal_row(n, q)[k]


def qbinom_product(n: int, k: int, q: int) -> int:
    """The quotient form prod (q^{n-i} - 1) / (q^{i+1} - 1); kept as a cross-check."""
    if n < 0 or k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    value, rem = divmod(num, den)
    assert rem == 0
    return value


def intersection_count(n: int, k: int, l: int, j: int, q: int) -> int:
    """#{B in V(l) : dim(A ∩ B) = j} for any fixed A in V(k)."""
    if not (0 <= j <= min(k, l)) or k > n or l > n:
        return 0
    return q ** ((k - j) * (l - j)) * qbinom(n - k, l - j, q) * qbinom(k, j, q)


# --- regimes and layer bounds --------------------------------------------------


def regime(n: int, d: int) -> str:
    if n <= d:
        return TRIVIAL
    if n == d + 1:
        return COVERED_SMALL
    if n > 2 * d:
        return COVERED_LARGE
    return GAP


def is_covered(n: int, d: int) -> bool:
    return regime(n, d) in (COVERED_SMALL, COVERED_LARGE)


def theorem_bound(n: int, d: int, q: int) -> int:
    """Maximum size of a diameter-<=d family, for n = d + 1 and n > 2d.

    In the trivial regime n <= d every family qualifies and the value is the
    total number of subspaces.  In the gap regime the same two-case formula is
    returned as a reference value only; it is not known to be an upper bound.
    """
    if d < 0 or n < 0:
        raise ValueError("n and d must be nonnegative")
    if n <= d:
        return sum(qbinom(n, i, q) for i in range(n + 1))
    t = d // 2
    ball = sum(qbinom(n, i, q) for i in range(t + 1))
    return ball if d % 2 == 0 else ball + qbinom(n - 1, t, q)


def ekr_bound(n: int, k: int, s: int, q: int) -> int:
    """Largest s-intersecting family of k-spaces in an n-dimensional space.

    Requires n >= 2k - s.  For s <= 0 there is no constraint and the value is
    the full layer count.
    """
    if s <= 0:
        return qbinom(n, k, q)
    if n < 2 * k - s:
        raise RegimeError(f"intersecting bound needs n >= 2k - s, got n={n}, k={k}, s={s}")
    return max(qbinom(n - s, k - s, q), qbinom(2 * k - s, k - s, q))


def slice_hypothesis(n: int, k: int, t: int) -> bool:
    """Whether the intersecting bound legitimately applies to layer k (n >= k + t)."""
    return k - t <= 0 or n >= k + t


def slice_bound(n: int, k: int, t: int, q: int) -> int:
    """Layer cap max{[n-k+t, t], [k+t, t]} for a (k-t)-intersecting layer."""
    if k - t < 0:
        return qbinom(n, k, q)
    return max(qbinom(n - k + t, t, q), qbinom(k + t, t, q))


def layer_t_bound(n: int, t: int, M: int, q: int) -> int:
    """Number of t-spaces meeting a fixed M-space nontrivially."""
    if not 0 <= M <= n:
        raise ValueError(f"M={M} out of range for ambient {n}")
    value = qbinom(n, t, q) - q ** (M * t) * qbinom(n - M, t, q)
    assert value >= 0
    return value


def hyperplane_dominance(n: int, q: int) -> bool:
    """[n, 1] > sum_{i=1}^{n-1} [i, 1], the helper inequality of the small-d cases."""
    return qbinom(n, 1, q) > sum(qbinom(i, 1, q) for i in range(1, n))


# --- tail sums ---------------------------------------------------------------


def tail_sum_first(n: int, t: int, m: int, q: int) -> Fraction:
    """sum_{k=m}^{floor(n/2)} [n-k+t, t] / [n, t]."""
    if m < t + 1:
        raise RegimeError(f"first tail sum needs m >= t + 1, got m={m}, t={t}")
    den = qbinom(n, t, q)
    return sum((Fraction(qbinom(n - k + t, t, q), den) for k in range(m, n // 2 + 1)), Fraction(0))


def tail_side_condition(n: int, d: int) -> bool:
    return (n + d) // 2 + d // 2 < n


def tail_sum_second(n: int, d: int, q: int) -> Fraction:
    """sum_{k=floor(n/2)+1}^{floor((n+d)/2)} [k+t, t] / [n, t] with t = floor(d/2)."""
    if not tail_side_condition(n, d):
        raise RegimeError(f"side condition floor((n+d)/2) + floor(d/2) < n fails at n={n}, d={d}")
    t = d // 2
    den = qbinom(n, t, q)
    return sum(
        (Fraction(qbinom(k + t, t, q), den) for k in range(n // 2 + 1, (n + d) // 2 + 1)),
        Fraction(0),
    )


# --- partition function ------------------------------------------------------


def partition_numbers(kmax: int) -> list[int]:
    """p(0..kmax) by Euler's pentagonal-number recurrence."""
    p = [1] + [0] * kmax
    for k in range(1, kmax + 1):
        total, j = 0, 1
        while True:
            g1 = j * (3 * j - 1) // 2
            if g1 > k:
                break
            sign = 1 if j % 2 else -1
            total += sign * p[k - g1]
            g2 = j * (3 * j + 1) // 2
            if g2 <= k:
                total += sign * p[k - g2]
            j += 1
        p[k] = total
    return p


def partition_audit(kmax: int) -> list[tuple[int, int, bool]]:
    """(k, p(k), p(k) <= (3/2)^k) for k = 1..kmax, compared as p(k) 2^k <= 3^k."""
    if kmax < 1:
        raise ValueError("kmax must be >= 1")
    p = partition_numbers(kmax)
    return [(k, p[k], p[k] * 2**k <= 3**k) for k in range(1, kmax + 1)]


def product_audit(t: int) -> Fraction:
    """prod_{i=1}^{t} (1 - 2^{-(1+i)}), checked against the proof's lower bound."""
    if t < 2:
        raise ValueError("t must be >= 2")
    value = Fraction(1)
    for i in range(1, t + 1):
        value *= 1 - Fraction(1, 2 ** (1 + i))
    floor_value = Fraction(21, 32) if t == 2 else Fraction(1, 2)
    assert value >= floor_value
    return value


def euler_product_certificate(kmax: int = 40) -> dict[str, object]:
    """The y = prod_{i>=1}(1 - 2^{-i}) >= 1/4 argument, with its finite part checked exactly.

    p(k) <= (3/2)^k for all k gives f(1/2) = sum p(k) 2^{-k} <= 2/(2 - 3/2) = 4, so
    y = 1/f(1/2) >= 1/4 and 2y >= 1/2.  The finite range k <= kmax is audited here;
    k > kmax rests on the analytic estimate for p(k), which is not re-derived.
    """
    rows = partition_audit(kmax)
    p = [1] + [pk for _, pk, _ in rows]
    partial = sum((Fraction(pk, 2**k) for k, pk in enumerate(p)), Fraction(0))
    geometric_partial = sum((Fraction(3**k, 4**k) for k in range(kmax + 1)), Fraction(0))
    return {
        "kmax": kmax,
        "finite_range_holds": all(h for _, _, h in rows),
        "f_half_partial": partial,
        "f_half_partial_le_geometric_partial": partial <= geometric_partial,
        "f_half_bound": Fraction(2) / (2 - Fraction(3, 2)),
        "y_lower": Fraction(1, 4),
        "two_y_lower": Fraction(1, 2),
    }


# --- assembly of the d >= 4 argument -----------------------------------------


@dataclass
class BoundReport:
    q: int
    n: int
    d: int
    t: int
    bound: int
    layer_bounds: dict[int, int] = field(default_factory=dict)
    audit: dict[str, Fraction] = field(default_factory=dict)
    checks: dict[str, bool] = field(default_factory=dict)
    hypothesis_violations: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    @property
    def failures(self) -> list[str]:
        return [name for name, ok in self.checks.items() if not ok]


def proof_constants(q: int, t: int) -> tuple[Fraction, Fraction]:
    if q == 2 and t == 2:
        return Fraction(11, 32), Fraction(41, 64)
    return Fraction(1, 2), Fraction(2, 7)


def layer_bound_audit(n: int, d: int, q: int) -> BoundReport:
    """Re-run the d >= 4, n > 2d counting argument in exact arithmetic."""
    if not (n > 2 * d and d >= 4):
        raise RegimeError(f"outside regime: layer audit needs n > 2d and d >= 4, got n={n}, d={d}")
    t = d // 2
    qt = qbinom(n, t, q)
    rep = BoundReport(q=q, n=n, d=d, t=t, bound=theorem_bound(n, d, q))
    for k in range(n + 1):
        rep.layer_bounds[k] = slice_bound(n, k, t, q)
        if not slice_hypothesis(n, k, t) and k <= (n + d) // 2:
            rep.hypothesis_violations.append(f"layer {k}: n={n} < k+t={k + t}")
    rep.checks["slice_hypothesis_in_window"] = not rep.hypothesis_violations

    # Branch m >= t + 1: the two tails, worst case m = t + 1.
    geo = Fraction(1, q**t - 1)
    first = tail_sum_first(n, t, t + 1, q)
    second = tail_sum_second(n, d, q)
    rep.audit.update(tail_first=first, tail_second=second, tail_limit=geo)
    rep.audit["tail_first_margin"] = geo - first
    rep.audit["tail_second_margin"] = geo - second
    rep.checks["tail_first_lt_limit"] = first < geo
    rep.checks["tail_second_lt_limit"] = second < geo
    ball = sum(qbinom(n, i, q) for i in range(t + 1))
    branch_a = 2 * geo * qt
    rep.audit["branch_large_m_total"] = branch_a
    rep.audit["branch_large_m_margin"] = ball - branch_a
    rep.checks["branch_large_m_lt_ball"] = branch_a < ball

    # Branch m <= t with top dimension M.
    c1, c2 = proof_constants(q, t)
    rep.audit["c1"], rep.audit["c2"] = c1, c2
    prod = product_audit(t)
    rep.audit["layer_t_product"] = prod
    rep.checks["c1_covers_product"] = 1 - prod <= c1
    if max(q, t) > 2:
        rep.checks["c2_covers_geometric"] = 2 * geo <= c2
    else:
        five = sorted([Fraction(1, 4**r) for r in range(1, 4) for _ in range(2)], reverse=True)[:5]
        rep.audit["five_largest_terms"] = sum(five, Fraction(0))
        rep.checks["c2_covers_five_terms"] = sum(five, Fraction(0)) <= c2

    M_low = t + 1 if d % 2 == 0 else t + 2
    M_high = min(t + d, (n + d) // 2)
    worst_t_ratio = Fraction(0)
    worst_tail_ratio = Fraction(0)
    for M in range(M_low, M_high + 1):
        worst_t_ratio = max(worst_t_ratio, Fraction(layer_t_bound(n, t, M, q), qt))
        tail = sum((Fraction(rep.layer_bounds[k], qt) for k in range(t + 1, M + 1)), Fraction(0))
        worst_tail_ratio = max(worst_tail_ratio, tail)
    rep.audit["layer_t_ratio_max"] = worst_t_ratio
    rep.audit["upper_layers_ratio_max"] = worst_tail_ratio
    rep.checks["layer_t_ratio_le_c1"] = worst_t_ratio <= c1
    rep.checks["upper_layers_ratio_le_c2"] = worst_tail_ratio <= c2

    lower = sum(qbinom(n, i, q) for i in range(t))
    branch_b = lower + (c1 + c2) * qt
    rep.audit["branch_small_m_total"] = branch_b
    rep.audit["branch_small_m_margin"] = ball - branch_b
    rep.checks["c1_plus_c2_lt_one"] = c1 + c2 < 1
    rep.checks["branch_small_m_lt_ball"] = branch_b < ball
    exact_b = lower + (worst_t_ratio + worst_tail_ratio) * qt
    rep.audit["branch_small_m_exact_total"] = exact_b
    rep.checks["branch_small_m_exact_lt_ball"] = exact_b < ball
    rep.checks["ball_le_bound"] = ball <= rep.bound
    return rep
