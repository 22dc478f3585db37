"""Closed-form bounds used to size attacks and keys.

``collision_ball_success_bound`` gives the probability that a Hamming ball
of candidate messages contains a collision with a fixed digest when the
public hash behaves like a random function: with ``B`` candidates and
``2^z`` digests the miss probability is ``(1 - 2^-z)^B <= exp(-B / 2^z)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .schemes import its_minimal_width

__all__ = [
    "ball_size",
    "BallBound",
    "collision_ball_success_bound",
    "its_key_bits",
    "two_step_key_bits",
]


def ball_size(ell: int, w: int) -> int:
    """Number of ``ell``-bit strings within Hamming distance ``w`` (exact)."""
    return sum(math.comb(ell, k) for k in range(min(w, ell) + 1))


def _success(count: int, z_bits: int) -> float:
    if count == 0:
        return 0.0
    # exp(log B - z log 2) stays finite for huge B and z.
    ratio = math.exp(math.log(count) - z_bits * math.log(2))
    return -math.expm1(-ratio)


@dataclass(frozen=True)
class BallBound:
    """Both forms of the collision-search success bound.

    Attributes
    ----------
    loose : float
        ``1 - exp(-C(ell, w) / 2^z)``, counting only the outer shell.
    full : float
        ``1 - exp(-|B| / 2^z)`` over the whole closed ball.
    shell_size, ball_size : int
        Exact candidate counts behind each form.
    """

    loose: float
    full: float
    shell_size: int
    ball_size: int


def collision_ball_success_bound(ell: int, w: int, z_bits: int) -> BallBound:
    """Probability that a radius-``w`` ball around an ``ell``-bit message
    holds a preimage of a given ``z_bits`` digest.

    Examples
    --------
    >>> round(collision_ball_success_bound(16, 2, 8).full, 4)
    0.4144
    """
    if not 0 <= w <= ell:
        raise ValueError("need 0 <= w <= ell")
    shell = math.comb(ell, w)
    ball = ball_size(ell, w)
    return BallBound(_success(shell, z_bits), _success(ball, z_bits), shell, ball)


def two_step_key_bits(z_bits: int, t_bits: int) -> int:
    """Key bits per two-step tag: one SU2 member."""
    return max(z_bits, t_bits) + t_bits


def its_key_bits(message_bits: int, t_bits: int) -> tuple[int, int]:
    """Minimal AU2 width and total key bits for an ITS tag.

    The composed tag needs the AU2 point (``z`` bits) and an SU2 member
    (``z + t`` bits) with ``z`` the smallest width whose AU2 constant stays
    at or below ``2^-t`` for the given message length.
    """
    z = its_minimal_width(message_bits, t_bits)
    return z, 2 * z + t_bits
