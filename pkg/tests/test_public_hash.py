import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkd_twostep import BitString
from qkd_twostep.hashing import PublicHashSpec, public_hash, public_hash_int
from qkd_twostep.hashing.public import hash_words_batch, message_words, prefix_state

bit_lists = st.lists(st.integers(0, 1), max_size=300)


@given(bit_lists, st.integers(1, 64))
def test_digest_width(bits, z):
    spec = PublicHashSpec(z)
    d = public_hash(spec, BitString(bits))
    assert len(d) == z
    assert d.to_int() == public_hash_int(spec, BitString(bits))


def test_trailing_zeros_change_digest():
    spec = PublicHashSpec(64)
    m = BitString.from_str("1011")
    assert public_hash_int(spec, m) != public_hash_int(spec, m + BitString.zeros(1))


def test_truncation_is_prefix_of_wide_digest(rng):
    m = BitString.random(200, rng)
    wide = public_hash_int(PublicHashSpec(64), m)
    for z in (1, 12, 40):
        assert public_hash_int(PublicHashSpec(z), m) == wide >> (64 - z)


@given(st.lists(bit_lists, min_size=1, max_size=8), st.integers(1, 64))
def test_batch_matches_scalar(messages, z):
    spec = PublicHashSpec(z)
    n = max(len(m) for m in messages)
    padded = [BitString(m + [0] * (n - len(m))) for m in messages]
    words = np.stack([message_words(m) for m in padded]) if n else np.zeros((len(padded), 0),
                                                                           dtype=np.uint64)
    got = hash_words_batch(spec, words, n)
    assert [int(v) for v in got] == [public_hash_int(spec, m) for m in padded]


def test_prefix_state_resumes_chain(rng):
    spec = PublicHashSpec(20)
    m = BitString.random(64 * 5 + 17, rng)
    words = message_words(m)
    state = np.array([prefix_state(spec, words[:3])], dtype=np.uint64)
    got = hash_words_batch(spec, words[None, 3:], len(m), state=state)
    assert int(got[0]) == public_hash_int(spec, m)


def test_mixer_seed_matters(rng):
    m = BitString.random(64, rng)
    assert public_hash_int(PublicHashSpec(64), m) != public_hash_int(PublicHashSpec(64, 1), m)


@pytest.mark.parametrize("z", [0, 65])
def test_width_domain(z):
    with pytest.raises(ValueError):
        PublicHashSpec(z)


def test_digests_look_uniform(rng):
    spec = PublicHashSpec(4)
    counts = np.bincount([public_hash_int(spec, BitString.random(40, rng)) for _ in range(4000)],
                         minlength=16)
    # chi-square with 15 degrees of freedom, far tail
    chi2 = ((counts - 250) ** 2 / 250).sum()
    assert chi2 < 45
