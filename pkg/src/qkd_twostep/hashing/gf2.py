"""Arithmetic in GF(2^n) with a published table of reduction polynomials.

Field elements are Python ints whose bit ``i`` is the coefficient of
``x^i``.  The reduction polynomial for each width is the lowest-weight
irreducible found by a deterministic search: the trinomial
``x^n + x^k + 1`` with the smallest ``k``, otherwise the pentanomial
``x^n + x^a + x^b + x^c + 1`` minimising ``(a, b, c)`` lexicographically.
The search result is shipped as ``data/reduction_polynomials.txt`` so the
hash families are reproducible without rerunning it.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

import numpy as np

__all__ = [
    "MAX_WIDTH",
    "GF2n",
    "clmul",
    "poly_mod",
    "poly_divmod",
    "poly_gcd",
    "is_irreducible",
    "search_reduction_polynomial",
    "reduction_polynomial",
    "format_polynomial_table",
]

MAX_WIDTH = 256
_TABLE_FILE = "reduction_polynomials.txt"
TABLE_VERSION = 1


def clmul(a: int, b: int) -> int:
    """Carry-less product of two GF(2)[x] polynomials."""
    if a < b:
        a, b = b, a
    out = 0
    while b:
        low = b & -b
        out ^= a << (low.bit_length() - 1)
        b ^= low
    return out


def poly_divmod(a: int, m: int) -> tuple[int, int]:
    """Quotient and remainder of ``a`` divided by ``m`` over GF(2)."""
    if m == 0:
        raise ZeroDivisionError("polynomial division by zero")
    dm = m.bit_length()
    q = 0
    while a.bit_length() >= dm:
        shift = a.bit_length() - dm
        q |= 1 << shift
        a ^= m << shift
    return q, a


def poly_mod(a: int, m: int) -> int:
    return poly_divmod(a, m)[1]


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def is_irreducible(poly: int) -> bool:
    """Ben-Or irreducibility test for a polynomial over GF(2).

    ``poly`` of degree ``n`` is irreducible iff
    ``gcd(x^(2^i) - x mod poly, poly) == 1`` for every ``1 <= i <= n/2``.
    """
    n = poly.bit_length() - 1
    if n < 1:
        return False
    if n == 1:
        return True
    if not poly & 1:
        return False
    power = 0b10  # x
    for _ in range(n // 2):
        power = poly_mod(clmul(power, power), poly)
        if poly_gcd(power ^ 0b10, poly) != 1:
            return False
    return True


def search_reduction_polynomial(n: int) -> int:
    """Deterministic lowest-weight irreducible polynomial of degree ``n``."""
    if not 1 <= n <= MAX_WIDTH:
        raise ValueError(f"width must be in 1..{MAX_WIDTH}")
    top = 1 << n
    if n == 1:
        return top | 1
    for k in range(1, n):
        cand = top | (1 << k) | 1
        if is_irreducible(cand):
            return cand
    for a in range(3, n):
        for b in range(2, a):
            for c in range(1, b):
                cand = top | (1 << a) | (1 << b) | (1 << c) | 1
                if is_irreducible(cand):
                    return cand
    raise RuntimeError(f"no trinomial or pentanomial of degree {n}")


def _exponents(poly: int) -> list[int]:
    return [i for i in range(poly.bit_length() - 1, -1, -1) if poly >> i & 1]


def format_polynomial_table(polys: dict[int, int]) -> str:
    """Render the published text form of a width -> polynomial table."""
    lines = [
        f"# GF(2^n) reduction polynomials, table version {TABLE_VERSION}",
        "# columns: width, then exponents of the nonzero terms below x^width",
    ]
    for n in sorted(polys):
        lines.append(" ".join(str(e) for e in [n] + _exponents(polys[n])[1:]))
    return "\n".join(lines) + "\n"


@lru_cache(maxsize=1)
def _load_table() -> dict[int, int]:
    text = resources.files("qkd_twostep.data").joinpath(_TABLE_FILE).read_text()
    table = {}
    for line in text.splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        width, *exps = (int(tok) for tok in line.split())
        poly = 1 << width
        for e in exps:
            poly |= 1 << e
        table[width] = poly
    return table


def reduction_polynomial(n: int) -> int:
    """Published reduction polynomial for GF(2^n)."""
    try:
        return _load_table()[n]
    except KeyError:
        raise ValueError(f"no published polynomial for width {n}") from None


class GF2n:
    """The field GF(2^width) under the published reduction polynomial.

    Parameters
    ----------
    width : int
        Extension degree, ``1 <= width <= 256``.

    Examples
    --------
    >>> F = GF2n(8)
    >>> F.mul(0x57, 0x83)
    193
    """

    def __init__(self, width: int) -> None:
        self.width = width
        self.poly = reduction_polynomial(width)
        self.order = 1 << width

    def __repr__(self) -> str:
        return f"GF2n({self.width})"

    def reduce(self, a: int) -> int:
        n = self.width
        poly = self.poly
        while a >> n:
            shift = a.bit_length() - 1 - n
            a ^= poly << shift
        return a

    def mul(self, a: int, b: int) -> int:
        return self.reduce(clmul(a, b))

    def pow(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    def mul_table(self) -> np.ndarray:
        """Full multiplication table; only sensible for small widths."""
        if self.width > 12:
            raise ValueError("multiplication table too large")
        q = self.order
        a = np.arange(q, dtype=np.int64)
        prod = np.zeros((q, q), dtype=np.int64)
        shifted = a.copy()
        for bit in range(self.width):
            sel = (a >> bit) & 1
            prod ^= np.outer(np.ones(q, dtype=np.int64), shifted) * sel[:, None]
            shifted = shifted << 1
            overflow = (shifted >> self.width) & 1
            shifted ^= overflow * self.poly
        return prod
