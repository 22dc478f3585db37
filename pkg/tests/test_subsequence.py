import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qkd_twostep import BitString
from qkd_twostep.adversary import (
    CraftError,
    craft_bases_mask,
    craft_paced_mask,
    find_subsequence,
    subsequence_probability,
)


def is_subsequence_dp(s, S):
    """Independent oracle: longest common subsequence equals len(s)."""
    m, n = len(s), len(S)
    table = np.zeros((m + 1, n + 1), dtype=int)
    for i in range(1, m + 1):
        for j in range(1, n + 1):
            if s[i - 1] == S[j - 1]:
                table[i, j] = table[i - 1, j - 1] + 1
            else:
                table[i, j] = max(table[i - 1, j], table[i, j - 1])
    return table[m, n] == m


def test_doc_example():
    assert find_subsequence([1, 0, 1], [1, 1, 0, 1, 0]) == [0, 2, 3]


@pytest.mark.parametrize("n", range(1, 8))
def test_matches_dp_exhaustively(n):
    for m in range(1, n + 1):
        for s in itertools.product((0, 1), repeat=m):
            for S in itertools.product((0, 1), repeat=n):
                got = find_subsequence(s, S)
                assert (got is not None) == is_subsequence_dp(s, S)
                if got is not None:
                    assert np.all(np.diff(got) > 0)
                    assert [S[j] for j in got] == list(s)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=12),
       st.lists(st.integers(0, 1), min_size=1, max_size=12))
def test_matches_dp_random(s, S):
    assert (find_subsequence(s, S) is not None) == is_subsequence_dp(s, S)


def test_longer_pattern_is_none():
    assert find_subsequence([1, 1, 1], [1, 1]) is None


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        find_subsequence([], [1])


@pytest.mark.parametrize("m,n,expected", [
    (2, 4, Fraction(11, 16)),
    (1, 1, Fraction(1, 2)),
    (0, 3, Fraction(1)),
    (3, 3, Fraction(1, 8)),
])
def test_probability_values(m, n, expected):
    assert subsequence_probability(m, n) == expected


@pytest.mark.parametrize("n", range(1, 9))
def test_probability_independent_of_pattern(n):
    hosts = list(itertools.product((0, 1), repeat=n))
    for m in range(1, n + 1):
        want = subsequence_probability(m, n)
        for s in itertools.product((0, 1), repeat=m):
            hits = sum(find_subsequence(s, S) is not None for S in hosts)
            assert Fraction(hits, 2 ** n) == want


def test_probability_rejects_bad_lengths():
    with pytest.raises(ValueError):
        subsequence_probability(5, 4)
    with pytest.raises(ValueError):
        subsequence_probability(-1, 4)


def test_empirical_frequency(rng):
    m, n, trials = 20, 40, 4000
    s = rng.integers(0, 2, m)
    hosts = rng.integers(0, 2, (trials, n))
    rate = np.mean([find_subsequence(s, h) is not None for h in hosts])
    p = float(subsequence_probability(m, n))
    assert abs(rate - p) <= 3 * math.sqrt(p * (1 - p) / trials)


def test_craft_exact_embedding():
    raw = BitString.from_str("0110100110010110")
    target = BitString.from_str("0101")
    mask, mismatches = craft_bases_mask(raw, target, 0)
    assert mismatches == 0
    assert mask.weight() == 4
    assert raw.select(mask) == target


def test_craft_all_mismatched():
    raw = BitString.zeros(16)
    target = BitString.from_str("1111")
    mask, mismatches = craft_bases_mask(raw, target, 4)
    assert mismatches == 4
    assert mask.array[:4].tolist() == [1, 1, 1, 1]


def test_craft_budget_exceeded():
    with pytest.raises(CraftError):
        craft_bases_mask(BitString.zeros(16), BitString.from_str("1111"), 3)


def test_craft_target_too_long():
    with pytest.raises(ValueError):
        craft_bases_mask(BitString.zeros(8), BitString.zeros(5), 2)


@given(st.integers(0, 2 ** 32 - 1))
def test_craft_mismatch_count_is_hamming(seed):
    rng = np.random.default_rng(seed)
    raw = BitString.random(64, rng)
    target = BitString.random(32, rng)
    try:
        mask, mismatches = craft_bases_mask(raw, target, 16)
    except CraftError:
        return
    assert mask.weight() == 32
    assert raw.select(mask).hamming(target) == mismatches <= 16


def test_paced_craft_respects_budget(rng):
    raw = BitString.random(1024, rng)
    target = BitString.random(448, rng)
    budget = [3] * 28
    res = craft_paced_mask(raw, target, budget)
    assert res.ok
    assert len(res.positions) == 448
    assert res.mask.weight() == 448
    assert raw.select(res.mask).hamming(target) == res.mismatches
    assert np.all(np.asarray(res.per_block) <= 3)


def test_paced_craft_needs_budget_per_block():
    with pytest.raises(ValueError):
        craft_paced_mask(BitString.zeros(64), BitString.zeros(32), [1])
