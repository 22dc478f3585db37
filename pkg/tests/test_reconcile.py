import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkd_twostep import BitString
from qkd_twostep.protocol import (
    ConfirmSpec,
    PaSpec,
    apply_mask,
    binary_entropy,
    confirm,
    decode_error_rate,
    ec_codes,
    ec_correct,
    ec_syndrome,
    encode_error_rate,
    pa_apply,
    pa_margin,
    pa_output_length,
    select_code,
    sift_mask,
)
from qkd_twostep.quantum import EMPTY


def test_sift_mask_ignores_empty():
    a = np.array([0, 1, 1, 0, EMPTY])
    b = np.array([0, 0, 1, EMPTY, EMPTY])
    assert sift_mask(a, b).to_str() == "10100"


def test_apply_mask_reads_empty_as_zero():
    raw = np.array([1, EMPTY, 1, 0])
    assert apply_mask(raw, BitString.from_str("1110")).to_str() == "101"


def test_published_codes():
    codes = ec_codes()
    assert [(c.block_len, c.syndrome_len, c.radius) for c in codes] == [
        (16, 5, 1), (16, 6, 1), (16, 8, 2)]
    assert [c.index for c in codes] == [1, 2, 3]


@pytest.mark.parametrize("code", ec_codes(), ids=lambda c: f"code{c.index}")
def test_every_pattern_within_radius_corrected(code, rng):
    L = code.block_len
    key = BitString.random(L, rng)
    syn = ec_syndrome(code, key)
    for w in range(code.radius + 1):
        for pos in itertools.combinations(range(L), w):
            assert ec_correct(code, key.flip(pos), syn) == key


@given(st.lists(st.integers(0, 1), min_size=1, max_size=100), st.sampled_from(ec_codes()))
def test_syndrome_is_linear(bits, code):
    k = BitString(bits)
    other = BitString(bits[::-1])
    assert ec_syndrome(code, k ^ other) == ec_syndrome(code, k) ^ ec_syndrome(code, other)
    assert len(ec_syndrome(code, k)) == code.syndrome_bits(len(k))


def test_correct_rejects_wrong_length(rng):
    code = ec_codes()[0]
    with pytest.raises(ValueError):
        ec_correct(code, BitString.random(32, rng), BitString.zeros(3))


@pytest.mark.parametrize("eps,index", [(0.0, 1), (0.02, 1), (0.03, 2), (0.06, 3), (0.3, 3)])
def test_select_code(eps, index):
    assert select_code(eps).index == index


def test_confirm_detects_single_difference(rng):
    spec = ConfirmSpec(int(rng.integers(1, 2 ** 32)))
    k = BitString.random(1000, rng)
    assert len(confirm(spec, k)) == 32
    assert confirm(spec, k) != confirm(spec, k.flip([17]))


@given(st.lists(st.integers(0, 1), min_size=1, max_size=40), st.integers(0, 12), st.data())
def test_toeplitz_matches_matrix(bits, r, data):
    key = BitString(bits)
    n = len(key)
    seed = BitString(data.draw(st.lists(st.integers(0, 1), min_size=r + n - 1,
                                        max_size=r + n - 1)) if r else [])
    spec = PaSpec(seed, r)
    out = pa_apply(spec, key)
    if r:
        assert out.array.tolist() == (spec.matrix(n) @ key.array.astype(int) % 2).tolist()
    else:
        assert len(out) == 0


def test_toeplitz_seed_length_checked(rng):
    with pytest.raises(ValueError):
        pa_apply(PaSpec(BitString.zeros(10), 4), BitString.random(8, rng))


def test_pa_lengths():
    assert pa_margin(100) == 16
    assert pa_margin(1024) == 64
    assert pa_margin(5000) == 128
    assert pa_output_length(2048, 0.0) == 2048 - 64
    assert pa_output_length(64, 0.5) == 0
    n = 2000
    assert pa_output_length(n, 0.05) == int(n * (1 - binary_entropy(0.05))) - 64


@given(st.floats(0, 1))
def test_error_rate_field(eps):
    field = encode_error_rate(eps)
    assert len(field) == 16
    assert abs(decode_error_rate(field) - eps) <= 1 / 65536 or eps > 0xFFFF / 65536


def test_entropy_edges():
    assert binary_entropy(0.0) == 0.0
    assert binary_entropy(0.5) == 1.0
