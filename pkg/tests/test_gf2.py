import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkd_twostep.hashing import GF2n, reduction_polynomial
from qkd_twostep.hashing.gf2 import clmul, is_irreducible, poly_divmod, poly_gcd


def test_aes_field_example():
    # x^8 + x^4 + x^3 + x + 1 is the usual choice for GF(2^8).
    assert GF2n(8).mul(0x57, 0x83) == 0xC1


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8, 12, 16, 32, 64, 128, 256])
def test_published_polynomials_are_irreducible(n):
    poly = reduction_polynomial(n)
    assert poly.bit_length() == n + 1
    assert is_irreducible(poly)


def test_unknown_width():
    with pytest.raises(ValueError):
        reduction_polynomial(257)


@given(st.integers(0, 2**40), st.integers(1, 2**20))
def test_divmod_identity(a, m):
    q, r = poly_divmod(a, m)
    assert clmul(q, m) ^ r == a
    assert r.bit_length() < m.bit_length()


@pytest.mark.parametrize("width", [4, 8, 13])
def test_field_axioms(width):
    F = GF2n(width)
    for a in range(1, min(F.order, 200)):
        inv = F.pow(a, F.order - 2)
        assert F.mul(a, inv) == 1


@given(st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1), st.integers(0, 2**16 - 1))
def test_distributive(a, b, c):
    F = GF2n(16)
    assert F.mul(a, b ^ c) == F.mul(a, b) ^ F.mul(a, c)
    assert F.mul(a, b) == F.mul(b, a)


def test_mul_table_matches_scalar():
    F = GF2n(5)
    table = F.mul_table()
    for a in range(F.order):
        for b in range(F.order):
            assert table[a, b] == F.mul(a, b)


def test_gcd_of_reducible():
    # (x + 1)^2 = x^2 + 1 shares the factor x + 1 with x^3 + 1.
    assert poly_gcd(0b101, 0b1001) == 0b11
    assert not is_irreducible(0b101)
