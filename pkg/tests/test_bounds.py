import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkd_twostep.hashing import ball_size, collision_ball_success_bound, its_key_bits, two_step_key_bits


def test_ball_size_small_example():
    assert ball_size(64, 3) == 43745


@given(st.integers(1, 200), st.integers(0, 10))
def test_ball_at_least_shell(ell, w):
    w = min(w, ell)
    b = collision_ball_success_bound(ell, w, 20)
    assert b.ball_size >= b.shell_size
    assert b.full >= b.loose


def test_large_parameters_stay_finite():
    b = collision_ball_success_bound(2 ** 12, 32, 256)
    assert b.full >= 0.999
    assert b.loose >= 0.999


def test_matches_closed_form():
    b = collision_ball_success_bound(64, 3, 12)
    assert b.full == pytest.approx(1 - math.exp(-43745 / 4096), rel=1e-12)


def test_domain():
    with pytest.raises(ValueError):
        collision_ball_success_bound(4, 5, 8)


def test_key_bits():
    assert two_step_key_bits(256, 64) == 320
    assert its_key_bits(10 ** 12, 64) == (98, 260)
    assert [its_key_bits(10 ** e, 64)[1] for e in (12, 15, 18, 21, 24)] == [260, 280, 298, 318, 338]
