"""Embedding one bit string in another as a subsequence.

Eve can choose which of Alice's raw positions count as sifted by forging
the sifting mask.  If her own sifted key with Bob appears as a
subsequence of Alice's raw key, a mask exists under which Alice ends up
with exactly that key.  When it does not appear, a few forced positions
with the wrong value turn the task into a near miss that error
correction later repairs.

Indices returned here are 0-based.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from ..bits import BitString

__all__ = [
    "CraftError",
    "CraftResult",
    "find_subsequence",
    "subsequence_probability",
    "craft_bases_mask",
    "craft_paced_mask",
]


class CraftError(ValueError):
    """No mask within the mismatch budget."""


def _as_array(bits) -> np.ndarray:
    if isinstance(bits, BitString):
        return bits.array
    arr = np.asarray(bits, dtype=np.int8).reshape(-1)
    return arr


def _next_tables(S: np.ndarray) -> tuple[list[int], list[int]]:
    """``nxt[b][p]``: first index ``>= p`` holding ``b``, or ``len(S)``."""
    n = S.size
    idx = np.arange(n)
    tables = []
    for b in (0, 1):
        pos = np.where(S == b, idx, n)
        nxt = np.minimum.accumulate(pos[::-1])[::-1]
        tables.append(nxt.tolist() + [n])
    return tables[0], tables[1]


def _greedy(s: np.ndarray, S: np.ndarray) -> list[int]:
    """Greedy first-match scan; returns the matched prefix positions."""
    nxt = _next_tables(S)
    n = S.size
    out: list[int] = []
    p = 0
    for b in s.tolist():
        j = nxt[b][p]
        if j >= n:
            break
        out.append(j)
        p = j + 1
    return out


def find_subsequence(s, S) -> list[int] | None:
    """Embed ``s`` in ``S`` by the greedy first-match scan.

    Parameters
    ----------
    s : BitString or array_like
        String to embed, length ``m``.
    S : BitString or array_like
        Host string, length ``n``.

    Returns
    -------
    list of int or None
        Strictly increasing 0-based indices ``J`` with ``S[J] == s``, or
        ``None`` when ``s`` is not a subsequence of ``S``.

    Raises
    ------
    ValueError
        If either input is empty.

    Examples
    --------
    >>> find_subsequence([1, 0, 1], [1, 1, 0, 1, 0])
    [0, 2, 3]
    >>> find_subsequence([1, 1], [0, 0, 1]) is None
    True
    """
    s_arr, S_arr = _as_array(s), _as_array(S)
    if s_arr.size == 0 or S_arr.size == 0:
        raise ValueError("find_subsequence needs non-empty inputs")
    if s_arr.size > S_arr.size:
        return None
    out = _greedy(s_arr, S_arr)
    return out if len(out) == s_arr.size else None


def subsequence_probability(m: int, n: int) -> Fraction:
    """Probability that a fixed ``m``-bit string embeds in a uniform ``n``-bit one.

    Equals ``sum_{l=m}^{n} C(n, l) / 2**n``; it does not depend on which
    ``m``-bit string is fixed.

    Raises
    ------
    ValueError
        If ``m > n`` or either is negative.
    """
    if m < 0 or n < 0:
        raise ValueError("lengths must be non-negative")
    if m > n:
        raise ValueError("m must not exceed n")
    return Fraction(sum(math.comb(n, l) for l in range(m, n + 1)), 2 ** n)


def _mask_from(positions: Sequence[int], n: int) -> BitString:
    arr = np.zeros(n, dtype=np.uint8)
    arr[list(positions)] = 1
    return BitString(arr)


def craft_bases_mask(raw_a, target, k_budget: int) -> tuple[BitString, int]:
    """Mask selecting ``target`` from ``raw_a`` with few wrong positions.

    First tries an exact embedding.  With a shortfall of ``D`` bits the
    first ``D`` target bits are pinned to the first ``D`` raw positions,
    whatever their value, and the rest is embedded greedily in what
    remains; ``D`` grows until that succeeds.

    Parameters
    ----------
    raw_a : BitString or array_like
        Alice's raw key, length ``n``.
    target : BitString or array_like
        Desired sifted key, at most ``n // 2`` bits.
    k_budget : int
        Largest tolerated number of wrong positions.

    Returns
    -------
    mask : BitString
        ``n`` bits with exactly ``len(target)`` ones.
    mismatches : int
        Hamming distance between ``raw_a[mask]`` and ``target``.

    Raises
    ------
    ValueError
        If ``target`` is longer than half of ``raw_a``.
    CraftError
        If more than ``k_budget`` pinned positions would be needed.
    """
    raw, t = _as_array(raw_a), _as_array(target)
    n, m = raw.size, t.size
    if m > n // 2:
        raise ValueError("target longer than half the raw key")
    if k_budget < 0:
        raise ValueError("k_budget must be non-negative")
    d = m - len(_greedy(t, raw))
    while d <= k_budget:
        rest = _greedy(t[d:], raw[d:]) if d < m else []
        short = (m - d) - len(rest)
        if short == 0:
            positions = list(range(d)) + [d + j for j in rest]
            mismatches = int(np.count_nonzero(raw[positions] != t))
            return _mask_from(positions, n), mismatches
        d += short
    raise CraftError(f"shortfall exceeds the budget of {k_budget}")


@dataclass(frozen=True)
class CraftResult:
    """Outcome of :func:`craft_paced_mask`.

    Attributes
    ----------
    mask : BitString
    positions : list of int
        Selected raw positions, one per target bit.
    mismatches : int
    per_block : ndarray of int
        Mismatches inside each target block.
    ok : bool
        Every block stayed within its budget.
    """

    mask: BitString
    positions: list
    mismatches: int
    per_block: np.ndarray
    ok: bool


def craft_paced_mask(raw_a, target, block_budget: Sequence[int], block_len: int = 16,
                     tail: float = 1.5) -> CraftResult:
    """Mask for ``target`` whose wrong positions are spread over blocks.

    The scan keeps pace with the schedule ``i * (n - tail * sqrt(m)) / m``
    over target bits ``i``, so it aims to finish a little before the end
    of the raw key.  When it falls behind and the next raw bit has the
    wrong value, that raw bit is taken anyway, costing one mismatch in the
    current block.  Mismatches are refused once a block has used its
    budget, except when the raw key would otherwise run out.

    Parameters
    ----------
    raw_a, target : BitString or array_like
    block_budget : sequence of int
        Allowed mismatches for each ``block_len``-bit block of ``target``.
    block_len : int, optional
    tail : float, optional
        Raw bits left unused by the schedule, in units of ``sqrt(m)``.
    """
    raw, t = _as_array(raw_a), _as_array(target)
    n, m = raw.size, t.size
    n_blocks = -(-m // block_len)
    budget = list(block_budget)
    if len(budget) < n_blocks:
        raise ValueError("one budget entry is needed per target block")
    if m > n:
        raise ValueError("target longer than the raw key")
    nxt = _next_tables(raw)
    raw_list = raw.tolist()
    rho = (n - tail * math.sqrt(m)) / m if m else 0.0
    used = [0] * n_blocks
    positions: list[int] = []
    p = 0
    ok = True
    for i, b in enumerate(t.tolist()):
        blk = i // block_len
        latest = n - (m - i)
        j = nxt[b][p]
        if j == p:
            take = p
        else:
            behind = p > rho * i
            if j > latest:
                take = p
            elif behind and used[blk] < budget[blk]:
                take = p
            else:
                take = j
        if raw_list[take] != b:
            used[blk] += 1
            if used[blk] > budget[blk]:
                ok = False
        positions.append(take)
        p = take + 1
    return CraftResult(_mask_from(positions, n), positions, sum(used),
                       np.array(used, dtype=int), ok)
