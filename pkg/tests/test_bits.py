import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkd_twostep import BitString

bit_lists = st.lists(st.integers(0, 1), max_size=200)


@given(bit_lists)
def test_str_roundtrip(bits):
    b = BitString(bits)
    assert BitString.from_str(b.to_str()) == b
    assert len(b) == len(bits)


@given(st.integers(0, 2**70), st.integers(71, 90))
def test_int_roundtrip(value, n):
    assert BitString.from_int(value, n).to_int() == value


@given(bit_lists)
def test_bytes_roundtrip(bits):
    b = BitString(bits)
    assert BitString.from_bytes(b.to_bytes(), len(b)) == b


@given(bit_lists, bit_lists)
def test_xor_and_hamming(x, y):
    n = min(len(x), len(y))
    a, b = BitString(x[:n]), BitString(y[:n])
    assert (a ^ b).weight() == a.hamming(b)
    assert (a ^ b) ^ b == a


def test_from_int_rejects_overflow():
    with pytest.raises(ValueError):
        BitString.from_int(8, 3)


def test_rejects_non_bits():
    with pytest.raises(ValueError):
        BitString([0, 2])


def test_xor_length_mismatch():
    with pytest.raises(ValueError):
        BitString.from_str("01") ^ BitString.from_str("011")


def test_flip_twice_is_identity(rng):
    b = BitString.random(50, rng)
    assert b.flip([3, 3]) == b
    assert b.flip([3]).hamming(b) == 1


def test_select_keeps_order():
    b = BitString.from_str("10110")
    assert b.select(np.array([1, 0, 1, 1, 0])).to_str() == "111"
    assert b.select(BitString.from_str("01001")).to_str() == "00"


def test_immutable():
    b = BitString.from_str("101")
    with pytest.raises(ValueError):
        b.array[0] = 0


def test_concat_and_slicing():
    a, b = BitString.from_str("10"), BitString.from_str("011")
    assert (a + b).to_str() == "10011"
    assert BitString.concat([a, b]) == a + b
    assert (a + b)[1:4].to_str() == "001"
    assert (a + b)[0] == 1
