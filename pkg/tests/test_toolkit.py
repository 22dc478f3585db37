import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkd_twostep import BitString
from qkd_twostep.adversary import check_preimage, pa_preimage_seed, recover_key
from qkd_twostep.adversary.toolkit import (
    bits_to_poly,
    pa_null_units,
    poly_to_bits,
    spread_positions,
    swap_units,
)
from qkd_twostep.protocol.reconcile import (
    ConfirmSpec,
    PaSpec,
    confirm,
    ec_syndrome,
    pa_apply,
    select_code,
)


@given(st.lists(st.integers(0, 1), max_size=80))
def test_poly_roundtrip(bits):
    b = BitString(np.array(bits, dtype=np.uint8))
    assert poly_to_bits(bits_to_poly(b), len(b)) == b


def test_poly_too_wide():
    with pytest.raises(ValueError):
        poly_to_bits(0b1000, 3)


@given(st.integers(0, 2 ** 32 - 1), st.integers(1, 80), st.integers(1, 40))
def test_preimage_seed(seed, n, r):
    rng = np.random.default_rng(seed)
    key = BitString.random(n, rng)
    if key.weight() == 0:
        key = key.flip([0])
    target = BitString.random(r, rng)
    s = pa_preimage_seed(key, target)
    assert len(s) == n + r - 1
    assert check_preimage(s, key, target)


def test_zero_key_preimage():
    with pytest.raises(ValueError):
        pa_preimage_seed(BitString.zeros(8), BitString.from_str("1"))
    s = pa_preimage_seed(BitString.zeros(8), BitString.zeros(3))
    assert check_preimage(s, BitString.zeros(8), BitString.zeros(3))


def test_null_units_keep_output(rng):
    key = BitString.random(64, rng)
    seed = BitString.random(64 + 16 - 1, rng)
    out = pa_apply(PaSpec(seed, 16), key)
    units = pa_null_units(key, 16, count=20)
    assert units
    for u in units:
        assert pa_apply(PaSpec(seed.flip(u.tolist()), 16), key) == out


def test_recover_key(rng):
    code = select_code(0.06)
    key = BitString.random(128, rng)
    syn = ec_syndrome(code, key)
    co = confirm(ConfirmSpec(12345), key)
    # one error per block is within reach of EC alone
    noisy = key.flip([3, 40, 77])
    assert recover_key(code, noisy, [], syn, 12345, co) == key
    # a block with too many errors needs the uncertain list
    bad = key.flip([0, 1, 2, 4, 5])
    assert recover_key(code, bad, [0, 1, 2, 4, 5], syn, 12345, co) == key


def test_recover_key_gives_up(rng):
    code = select_code(0.06)
    key = BitString.random(64, rng)
    bad = key.flip(range(0, 16))
    unc = list(range(20, 40))
    out = recover_key(code, bad, unc, ec_syndrome(code, key), 7, confirm(ConfirmSpec(7), key))
    assert out is None


def test_spread_positions():
    assert spread_positions(5, 10) == [0, 1, 2, 3, 4]
    pos = spread_positions(100, 5)
    assert pos[0] == 0 and pos[-1] == 99 and len(pos) == 5


def test_swap_units():
    mask = BitString.from_str("0110100")
    pairs = swap_units(mask)
    assert pairs == [(0, 1), (2, 3), (4, 5)]
    for a, b in pairs:
        assert mask[a] != mask[b]
