"""Table-driven arithmetic in GF(q) for the small prime powers q <= 9.

Elements are plain integers in ``range(q)``.  The integer encodes the
polynomial representation of the element in base ``p``: digit ``i`` is the
coefficient of ``x**i``.  Elements do not know which field they belong to;
every operation goes through a :class:`FieldSpec`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product

SUPPORTED_ORDERS = (2, 3, 4, 5, 7, 8, 9)

# Fixed monic moduli, coefficients listed from x**0 upwards.
# Prime fields use x (reduction mod x is never needed for degree-1 fields).
_MODULI: dict[int, tuple[int, ...]] = {
    2: (0, 1),
    3: (0, 1),
    5: (0, 1),
    7: (0, 1),
    4: (1, 1, 1),  # x^2 + x + 1
    8: (1, 1, 0, 1),  # x^3 + x + 1
    9: (2, 2, 1),  # x^2 + 2x + 2
}


class FieldError(ValueError):
    pass


def _prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    p = next(d for d in range(2, q + 1) if q % d == 0)
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    return (p, e) if r == 1 else None


def _poly_divmod_remainder(num: list[int], den: tuple[int, ...], p: int) -> list[int]:
    """Remainder of ``num`` modulo monic-or-not ``den`` over F_p (low-to-high coefficients)."""
    num = list(num)
    dlead_inv = pow(den[-1], p - 2, p)
    ddeg = len(den) - 1
    for i in range(len(num) - 1, ddeg - 1, -1):
        c = num[i] * dlead_inv % p
        if c:
            for j, dc in enumerate(den):
                num[i - ddeg + j] = (num[i - ddeg + j] - c * dc) % p
    return num[:ddeg] if ddeg else []


def is_irreducible(poly: tuple[int, ...], p: int) -> bool:
    """Trial factorization: no monic divisor of degree 1..deg/2 over F_p."""
    deg = len(poly) - 1
    if deg < 1:
        return False
    for dd in range(1, deg // 2 + 1):
        for low in product(range(p), repeat=dd):
            div = tuple(low) + (1,)
            if not any(_poly_divmod_remainder(list(poly), div, p)):
                return False
    return True


def _digits(x: int, p: int, e: int) -> list[int]:
    out = []
    for _ in range(e):
        out.append(x % p)
        x //= p
    return out


def _undigits(ds: list[int], p: int) -> int:
    x = 0
    for d in reversed(ds):
        x = x * p + d
    return x


@dataclass(frozen=True)
class FieldSpec:
    q: int
    p: int
    e: int
    modulus: tuple[int, ...]
    add_table: tuple[tuple[int, ...], ...] = field(repr=False)
    mul_table: tuple[tuple[int, ...], ...] = field(repr=False)
    neg_table: tuple[int, ...] = field(repr=False)
    inv_table: tuple[int, ...] = field(repr=False)

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def sub(self, a: int, b: int) -> int:
        return self.add_table[a][self.neg_table[b]]

    def mul(self, a: int, b: int) -> int:
        return self.mul_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"inverse of 0 in GF({self.q})")
        return self.inv_table[a]

    def elements(self) -> range:
        return range(self.q)

    def order_of(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        if a == 0:
            raise ZeroDivisionError("0 has no multiplicative order")
        k, x = 1, a
        while x != 1:
            x = self.mul_table[x][a]
            k += 1
        return k

    def generator(self) -> int:
        """Smallest-index generator of the multiplicative group."""
        for a in range(1, self.q):
            if self.order_of(a) == self.q - 1:
                return a
        raise AssertionError(f"GF({self.q}) has no primitive element")  # pragma: no cover


@lru_cache(maxsize=None)
def field_make(q: int) -> FieldSpec:
    """Build the field of order ``q`` with its addition/multiplication tables."""
    if q not in SUPPORTED_ORDERS:
        raise FieldError(f"unsupported order {q}; supported orders are {SUPPORTED_ORDERS}")
    pe = _prime_power(q)
    assert pe is not None
    p, e = pe
    modulus = _MODULI[q]
    if len(modulus) - 1 != e or modulus[-1] != 1 or not is_irreducible(modulus, p):
        raise FieldError(f"modulus {modulus} is not monic irreducible of degree {e} over F_{p}")

    digits = [_digits(x, p, e) for x in range(q)]
    add = tuple(
        tuple(_undigits([(u + v) % p for u, v in zip(digits[a], digits[b])], p) for b in range(q))
        for a in range(q)
    )
    mul_rows = []
    for a in range(q):
        row = []
        for b in range(q):
            prod = [0] * (2 * e - 1)
            for i, u in enumerate(digits[a]):
                if u:
                    for j, v in enumerate(digits[b]):
                        prod[i + j] = (prod[i + j] + u * v) % p
            red = _poly_divmod_remainder(prod, modulus, p) if e > 1 else prod[:1]
            row.append(_undigits(red + [0] * (e - len(red)), p))
        mul_rows.append(tuple(row))
    mul = tuple(mul_rows)
    neg = tuple(next(b for b in range(q) if add[a][b] == 0) for a in range(q))
    inv = (0,) + tuple(next(b for b in range(1, q) if mul[a][b] == 1) for a in range(1, q))
    return FieldSpec(q, p, e, modulus, add, mul, neg, inv)
