"""Subspaces of F_q^n in canonical reduced row echelon form.

A :class:`Subspace` stores its RREF basis as a tuple of rows, each row a
tuple of field-element indices.  Two subspaces are equal iff their canonical
forms are equal, so equality and hashing are plain tuple comparisons.

For q = 2 the elimination kernels run on bit-packed integer rows (column j is
bit ``n - 1 - j``); other orders go through the table-driven field.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, product
from typing import Iterable, Iterator, Sequence

from .counting import qbinom
from .gf import FieldSpec, field_make

DEFAULT_CAP = 5_000_000
# Subspaces with at most this many vectors cache their point sets, which makes
# dim(A ∩ B) a set intersection for q > 2.
POINT_SET_LIMIT = 2048

Vector = tuple[int, ...]


class CapExceeded(RuntimeError):
    """Raised when an enumeration would produce more objects than allowed."""

    def __init__(self, what: str, predicted: int, cap: int):
        super().__init__(f"{what}: predicted count {predicted} exceeds cap {cap}")
        self.predicted = predicted
        self.cap = cap


class AmbientMismatch(ValueError):
    pass


# --- elimination kernels -------------------------------------------------


def _to_mask(row: Sequence[int]) -> int:
    m = 0
    for x in row:
        m = (m << 1) | (x & 1)
    return m


def _from_mask(m: int, width: int) -> Vector:
    return tuple((m >> (width - 1 - j)) & 1 for j in range(width))


def _gf2_reduce(masks: Iterable[int]) -> list[int]:
    """Fully reduced echelon basis of the span, sorted by pivot (highest bit first)."""
    basis: dict[int, int] = {}
    for m in masks:
        for piv, row in basis.items():
            if m & piv:
                m ^= row
        if m:
            piv = 1 << (m.bit_length() - 1)
            for other, row in basis.items():
                if row & piv:
                    basis[other] = row ^ m
            basis[piv] = m
    return [basis[p] for p in sorted(basis, reverse=True)]


def _gf2_rank(masks: Iterable[int]) -> int:
    pivots: list[int] = []
    rank = 0
    for m in masks:
        for p in pivots:
            m = min(m, m ^ p)
        if m:
            pivots.append(m)
            pivots.sort(reverse=True)
            rank += 1
    return rank


def _generic_reduce(rows: Iterable[Sequence[int]], width: int, F: FieldSpec) -> list[list[int]]:
    add, mul, neg, inv = F.add_table, F.mul_table, F.neg_table, F.inv_table
    basis: dict[int, list[int]] = {}
    for r in rows:
        v = list(r)
        for piv, row in basis.items():
            c = v[piv]
            if c:
                nc = neg[c]
                mrow = mul[nc]
                for j in range(piv, width):
                    if row[j]:
                        v[j] = add[v[j]][mrow[row[j]]]
        piv = next((j for j in range(width) if v[j]), None)
        if piv is None:
            continue
        s = inv[v[piv]]
        if s != 1:
            ms = mul[s]
            v = [ms[x] for x in v]
        for other, row in basis.items():
            c = row[piv]
            if c:
                mrow = mul[neg[c]]
                for j in range(piv, width):
                    if v[j]:
                        row[j] = add[row[j]][mrow[v[j]]]
        basis[piv] = v
    return [basis[p] for p in sorted(basis)]


def reduce_rows(rows: Iterable[Sequence[int]], width: int, q: int) -> tuple[Vector, ...]:
    """Canonical RREF rows (zero rows dropped) of the span of ``rows``."""
    if q == 2:
        return tuple(_from_mask(m, width) for m in _gf2_reduce(_to_mask(r) for r in rows))
    return tuple(tuple(r) for r in _generic_reduce(rows, width, field_make(q)))


def rank_of(rows: Iterable[Sequence[int]], width: int, q: int) -> int:
    if q == 2:
        return _gf2_rank(_to_mask(r) for r in rows)
    return len(_generic_reduce(rows, width, field_make(q)))


# --- the Subspace value --------------------------------------------------


@dataclass(frozen=True, eq=True)
class Subspace:
    """A subspace of F_q^n, identified by its RREF basis."""

    q: int
    n: int
    rows: tuple[Vector, ...]

    @property
    def k(self) -> int:
        return len(self.rows)

    @cached_property
    def pivots(self) -> tuple[int, ...]:
        return tuple(next(j for j, x in enumerate(r) if x) for r in self.rows)

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(_to_mask(r) for r in self.rows)

    @cached_property
    def points(self) -> frozenset[int] | None:
        """Every vector of the subspace as a base-q integer, or None if too many."""
        if self.q ** self.k > POINT_SET_LIMIT:
            return None
        F = field_make(self.q)
        vecs = [(0,) * self.n]
        for r in self.rows:
            scaled = [tuple(F.mul_table[c][x] for x in r) for c in range(1, self.q)]
            vecs += [tuple(F.add_table[a][b] for a, b in zip(v, w)) for v in vecs for w in scaled]
        q = self.q
        out = set()
        for v in vecs:
            code = 0
            for x in v:
                code = code * q + x
            out.add(code)
        return frozenset(out)

    @cached_property
    def free_values(self) -> tuple[int, ...]:
        """Entries at non-pivot columns right of each pivot, row-major."""
        piv = set(self.pivots)
        return tuple(
            r[j] for r, p in zip(self.rows, self.pivots) for j in range(p + 1, self.n) if j not in piv
        )

    @cached_property
    def sort_key(self) -> tuple:
        # Same order as enumerate_subspaces within a dimension; dimension first.
        return (self.k, self.pivots, self.free_values)

    def canonical_bytes(self) -> bytes:
        return bytes([self.q, self.n, self.k]) + bytes(x for r in self.rows for x in r)

    def __lt__(self, other: "Subspace") -> bool:
        return self.sort_key < other.sort_key

    def __repr__(self) -> str:
        return f"Subspace(q={self.q}, n={self.n}, k={self.k}, {serialize_subspace(self)!r})"


def rref(rows: Iterable[Sequence[int]], n: int, q: int) -> Subspace:
    """Canonical subspace spanned by ``rows`` (vectors of length ``n`` over GF(q))."""
    rows = [tuple(r) for r in rows]
    for r in rows:
        if len(r) != n:
            raise AmbientMismatch(f"vector of length {len(r)} in ambient dimension {n}")
        if any(not 0 <= x < q for x in r):
            raise ValueError(f"entry out of range for GF({q}): {r}")
    return Subspace(q, n, reduce_rows(rows, n, q))


def zero_space(n: int, q: int) -> Subspace:
    return Subspace(q, n, ())


def full_space(n: int, q: int) -> Subspace:
    return Subspace(q, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))


def span(*vectors: Sequence[int], n: int | None = None, q: int = 2) -> Subspace:
    if n is None:
        if not vectors:
            raise ValueError("ambient dimension required for an empty span")
        n = len(vectors[0])
    return rref(vectors, n, q)


def unit(i: int, n: int) -> Vector:
    return tuple(int(j == i) for j in range(n))


def _check_same(A: Subspace, B: Subspace) -> None:
    if A.n != B.n or A.q != B.q:
        raise AmbientMismatch(f"ambient mismatch: GF({A.q})^{A.n} vs GF({B.q})^{B.n}")


def subspace_sum(A: Subspace, B: Subspace) -> Subspace:
    _check_same(A, B)
    return Subspace(A.q, A.n, reduce_rows(A.rows + B.rows, A.n, A.q))


def sum_dim(A: Subspace, B: Subspace) -> int:
    """dim(A + B) without building the canonical form."""
    _check_same(A, B)
    if A.q == 2:
        return _gf2_rank(A.masks + B.masks)
    pa, pb = A.points, B.points
    if pa is not None and pb is not None:
        common = len(pa & pb)
        meet = 0
        while common > 1:
            common //= A.q
            meet += 1
        return A.k + B.k - meet
    return rank_of(A.rows + B.rows, A.n, A.q)


def intersect(A: Subspace, B: Subspace) -> Subspace:
    """A ∩ B by Zassenhaus: reduce [[a | a], [b | 0]]; rows with zero left half span the meet."""
    _check_same(A, B)
    n, q = A.n, A.q
    zeros = (0,) * n
    stacked = [a + a for a in A.rows] + [b + zeros for b in B.rows]
    red = reduce_rows(stacked, 2 * n, q)
    sum_rows = [r[:n] for r in red if any(r[:n])]
    meet_rows = [r[n:] for r in red if not any(r[:n])]
    meet = Subspace(q, n, reduce_rows(meet_rows, n, q))
    assert len(sum_rows) + meet.k == A.k + B.k, "dimension formula violated"
    return meet


def contains(A: Subspace, v: Sequence[int]) -> bool:
    if len(v) != A.n:
        raise AmbientMismatch(f"vector of length {len(v)} in ambient dimension {A.n}")
    F = field_make(A.q)
    w = list(v)
    for row, p in zip(A.rows, A.pivots):
        c = w[p]
        if c:
            mrow = F.mul_table[F.neg_table[c]]
            for j in range(p, A.n):
                if row[j]:
                    w[j] = F.add_table[w[j]][mrow[row[j]]]
    return not any(w)


def is_subspace_of(A: Subspace, B: Subspace) -> bool:
    _check_same(A, B)
    return A.k <= B.k and all(contains(B, r) for r in A.rows)


def perp(A: Subspace) -> Subspace:
    """Orthogonal complement under the standard dot product."""
    F = field_make(A.q)
    n = A.n
    pivset = set(A.pivots)
    vecs = []
    for f in range(n):
        if f in pivset:
            continue
        v = [0] * n
        v[f] = 1
        for row, p in zip(A.rows, A.pivots):
            v[p] = F.neg_table[row[f]]
        vecs.append(v)
    W = Subspace(A.q, n, reduce_rows(vecs, n, A.q))
    assert W.k == n - A.k
    return W


def dot(u: Sequence[int], v: Sequence[int], q: int) -> int:
    F = field_make(q)
    s = 0
    for a, b in zip(u, v):
        s = F.add_table[s][F.mul_table[a][b]]
    return s


# --- enumeration ---------------------------------------------------------


def enumerate_subspaces(n: int, k: int, q: int, cap: int = DEFAULT_CAP) -> Iterator[Subspace]:
    """Every k-dimensional subspace of GF(q)^n exactly once.

    Order: pivot sets lexicographically, then free entries in odometer order
    (row-major positions, last position fastest).
    """
    if not 0 <= k <= n:
        raise ValueError(f"dimension {k} out of range for ambient {n}")
    field_make(q)
    predicted = qbinom(n, k, q)
    if predicted > cap:
        raise CapExceeded(f"V({k}) in GF({q})^{n}", predicted, cap)
    return _enumerate(n, k, q)


def _enumerate(n: int, k: int, q: int) -> Iterator[Subspace]:
    for pivots in combinations(range(n), k):
        pivset = set(pivots)
        slots = [(i, j) for i, p in enumerate(pivots) for j in range(p + 1, n) if j not in pivset]
        for values in product(range(q), repeat=len(slots)):
            rows = [[0] * n for _ in range(k)]
            for i, p in enumerate(pivots):
                rows[i][p] = 1
            for (i, j), x in zip(slots, values):
                rows[i][j] = x
            yield Subspace(q, n, tuple(tuple(r) for r in rows))


def total_count(n: int, q: int) -> int:
    return sum(qbinom(n, k, q) for k in range(n + 1))


def all_subspaces(n: int, q: int, cap: int = DEFAULT_CAP) -> list[Subspace]:
    """All subspaces, dimension ascending then canonical order."""
    predicted = total_count(n, q)
    if predicted > cap:
        raise CapExceeded(f"all subspaces of GF({q})^{n}", predicted, cap)
    return [S for k in range(n + 1) for S in _enumerate(n, k, q)]


# --- families ------------------------------------------------------------


class Family:
    """A finite set of subspaces of one ambient space, with dimension slices."""

    __slots__ = ("n", "q", "members", "slices")

    def __init__(self, n: int, q: int, members: Iterable[Subspace] = ()):
        ms = set(members)
        for S in ms:
            if S.n != n or S.q != q:
                raise AmbientMismatch(f"member {S!r} not in GF({q})^{n}")
        self.n = n
        self.q = q
        self.members: tuple[Subspace, ...] = tuple(sorted(ms, key=lambda S: S.sort_key))
        slices: dict[int, list[Subspace]] = {}
        for S in self.members:
            slices.setdefault(S.k, []).append(S)
        self.slices: dict[int, tuple[Subspace, ...]] = {k: tuple(v) for k, v in slices.items()}

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Subspace]:
        return iter(self.members)

    def __contains__(self, S: object) -> bool:
        return S in self.slices.get(getattr(S, "k", -1), ())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Family):
            return NotImplemented
        return (self.n, self.q, self.members) == (other.n, other.q, other.members)

    def __hash__(self) -> int:
        return hash((self.n, self.q, self.members))

    def __repr__(self) -> str:
        sizes = {k: len(v) for k, v in sorted(self.slices.items())}
        return f"Family(q={self.q}, n={self.n}, size={len(self)}, slices={sizes})"

    def slice(self, k: int) -> tuple[Subspace, ...]:
        return self.slices.get(k, ())

    @property
    def supp(self) -> frozenset[int]:
        return frozenset(self.slices)

    def union(self, other: Iterable[Subspace]) -> "Family":
        return Family(self.n, self.q, list(self.members) + list(other))


# --- text serialization --------------------------------------------------


def serialize_subspace(A: Subspace) -> str:
    """Rows as base-q digit strings joined by ';'.  The zero subspace is a single zero row."""
    if A.k == 0:
        return "0" * A.n
    return ";".join("".join(str(x) for x in r) for r in A.rows)


def parse_subspace(text: str, n: int, q: int) -> Subspace:
    text = text.strip()
    rows = []
    for part in text.split(";"):
        part = part.strip()
        if len(part) != n or not part.isdigit():
            raise ValueError(f"bad subspace row {part!r} for ambient dimension {n}")
        rows.append(tuple(int(c) for c in part))
    return rref(rows, n, q)


def format_family(F: Family) -> str:
    lines = [f"{F.q} {F.n}"] + [serialize_subspace(S) for S in F.members]
    return "\n".join(lines) + "\n"


def parse_family(text: str) -> Family:
    lines = [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.startswith("#")]
    if not lines:
        raise ValueError("family file is empty (missing 'q n' header)")
    try:
        q, n = (int(x) for x in lines[0].split())
    except ValueError:
        raise ValueError(f"bad family header {lines[0]!r}; expected 'q n'") from None
    field_make(q)
    return Family(n, q, (parse_subspace(ln, n, q) for ln in lines[1:]))
