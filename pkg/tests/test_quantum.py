import numpy as np
import pytest

from qkd_twostep.quantum import (
    EMPTY,
    IDEAL,
    ChannelParams,
    FrameConsumedError,
    intercept_resend,
    measure,
    memory_measure,
    memory_store,
    prepare,
    random_bits,
)


def test_matching_bases_read_exactly(rng):
    raw, bases = random_bits(500, rng), random_bits(500, rng)
    out = measure(prepare(raw, bases), bases, IDEAL, rng)
    assert np.array_equal(out, raw)


def test_conjugate_basis_is_a_coin(rng):
    n = 20000
    raw, bases = random_bits(n, rng), random_bits(n, rng)
    out = measure(prepare(raw, bases), 1 - bases, IDEAL, rng)
    assert abs(np.mean(out != raw) - 0.5) < 0.02


def test_frame_measured_once(rng):
    frame = prepare(random_bits(8, rng), random_bits(8, rng))
    measure(frame, np.zeros(8, dtype=np.int8), IDEAL, rng)
    assert frame.consumed
    with pytest.raises(FrameConsumedError):
        measure(frame, np.zeros(8, dtype=np.int8), IDEAL, rng)
    with pytest.raises(FrameConsumedError):
        memory_store(frame)


@pytest.mark.parametrize("loss,flip", [(0.0, 0.1), (0.3, 0.0), (0.2, 0.05)])
def test_channel_rates(loss, flip, rng):
    n = 20000
    raw, bases = random_bits(n, rng), random_bits(n, rng)
    out = measure(prepare(raw, bases), bases, ChannelParams(loss, flip), rng)
    lost = out == EMPTY
    assert abs(lost.mean() - loss) < 0.02
    assert abs(np.mean(out[~lost] != raw[~lost]) - flip) < 0.02


def test_memory_defers_basis_choice(rng):
    raw, bases = random_bits(300, rng), random_bits(300, rng)
    handle = memory_store(prepare(raw, bases))
    assert np.array_equal(memory_measure(handle, bases, rng), raw)
    with pytest.raises(FrameConsumedError):
        memory_measure(handle, bases, rng)


def test_intercept_resend_error_rate(rng):
    n = 40000
    raw, bases_a = random_bits(n, rng), random_bits(n, rng)
    eve_bases = random_bits(n, rng)
    _, resent = intercept_resend(prepare(raw, bases_a), eve_bases, rng)
    bob = measure(resent, bases_a, IDEAL, rng)
    assert abs(np.mean(bob != raw) - 0.25) < 0.01


def test_prepare_validation(rng):
    with pytest.raises(ValueError):
        prepare(np.zeros(3, dtype=np.int8), np.zeros(4, dtype=np.int8))
    with pytest.raises(ValueError):
        prepare(np.array([0, EMPTY]), np.array([0, 1]))
    with pytest.raises(ValueError):
        ChannelParams(1.5, 0.0)


def test_slots_view(rng):
    frame = prepare(np.array([1, 0]), np.array([0, 1]))
    assert frame.slots() == [(0, 1), (1, 0)]
