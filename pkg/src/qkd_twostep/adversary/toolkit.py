"""Algebra Eve needs beyond hashing: PA preimages, EC units, key recovery.

Toeplitz seeds as polynomials
-----------------------------
With seed ``s`` (``r + n - 1`` bits) and key ``k`` (``n`` bits), output
bit ``i`` of the Toeplitz hash is coefficient ``i + n - 1`` of the
product ``s(x) k(x)``, where bit ``j`` of a string is the coefficient of
``x**j``.  Hence ``s = (x**(n-1) K(x)) div k(x)`` maps ``k`` to any chosen
``K``, and every ``x**m div k(x)`` with ``m >= n + r - 1`` is a seed
change that leaves the output for ``k`` untouched.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from ..bits import BitString
from ..hashing.gf2 import poly_divmod
from ..protocol.reconcile import (
    ConfirmSpec,
    EcCode,
    PaSpec,
    confirm,
    ec_correct,
    pa_apply,
)

__all__ = [
    "bits_to_poly",
    "poly_to_bits",
    "pa_preimage_seed",
    "pa_null_units",
    "KeyUnit",
    "key_bit_units",
    "swap_units",
    "spread_positions",
    "recover_key",
    "RECOVERY_CAP_BITS",
    "check_preimage",
]

RECOVERY_CAP_BITS = 12


def bits_to_poly(bits: BitString) -> int:
    """Polynomial whose ``x**j`` coefficient is bit ``j``."""
    n = len(bits)
    if n == 0:
        return 0
    pad = -n % 8
    rev = np.packbits(bits.array[::-1]).tobytes()
    return int.from_bytes(rev, "big") >> pad


def poly_to_bits(poly: int, n: int) -> BitString:
    if poly.bit_length() > n:
        raise ValueError("polynomial does not fit")
    if n == 0:
        return BitString.zeros(0)
    raw = np.unpackbits(np.frombuffer(poly.to_bytes((n + 7) // 8, "big"), dtype=np.uint8))
    return BitString(raw[::-1][:n])


def pa_preimage_seed(key: BitString, target: BitString) -> BitString:
    """Seed under which the Toeplitz hash maps ``key`` to ``target``.

    Raises
    ------
    ValueError
        If ``key`` is all zeros and ``target`` is not.
    """
    n, r = len(key), len(target)
    if r == 0:
        return BitString.zeros(0)
    k = bits_to_poly(key)
    if k == 0:
        if target.weight():
            raise ValueError("the zero key hashes to zero under every seed")
        return BitString.zeros(r + n - 1)
    q, _ = poly_divmod(bits_to_poly(target) << (n - 1), k)
    seed = poly_to_bits(q, r + n - 1)
    return seed


def pa_null_units(key: BitString, r: int, count: int = 64) -> list[np.ndarray]:
    """Seed changes that keep the Toeplitz output of ``key`` fixed.

    Returns up to ``count`` position arrays (seed-relative).
    """
    n = len(key)
    if r == 0:
        return []
    k = bits_to_poly(key)
    if k == 0:
        return [np.array([j]) for j in range(min(count, r + n - 1))]
    deg = k.bit_length() - 1
    m = n + r - 1
    q, rem = poly_divmod(1 << m, k)
    out = []
    while len(out) < count and m <= n + r - 2 + deg:
        out.append(_set_bits(q))
        # x**(m+1) div k from x**m div k, one shift at a time.
        m += 1
        rem <<= 1
        q <<= 1
        if rem >> deg & 1:
            rem ^= k
            q ^= 1
    return out


def _set_bits(v: int) -> np.ndarray:
    bits = []
    i = 0
    while v:
        if v & 1:
            bits.append(i)
        v >>= 1
        i += 1
    return np.asarray(bits, dtype=np.int64)


@dataclass(frozen=True)
class KeyUnit:
    """Effect of flipping one key bit on the syndrome and the CO value.

    Attributes
    ----------
    key_position : int
    syndrome_positions : ndarray
        Syndrome bits that flip.
    co_positions : ndarray
        Confirmation-value bits that flip.
    """

    key_position: int
    syndrome_positions: np.ndarray
    co_positions: np.ndarray


def spread_positions(n: int, count: int, allowed=None) -> list[int]:
    """About ``count`` indices spread evenly over ``range(n)``, restricted to ``allowed``."""
    pool = np.arange(n) if allowed is None else np.asarray(sorted(allowed), dtype=np.int64)
    if pool.size <= count:
        return pool.tolist()
    pick = np.linspace(0, pool.size - 1, count).round().astype(np.int64)
    return np.unique(pool[pick]).tolist()


def key_bit_units(code: EcCode, key: BitString, point: int, count: int = 64,
                  avoid: set | None = None) -> list[KeyUnit]:
    """Key-bit units spread over the EC blocks.

    The syndrome is linear in the key, so flipping key bit ``j`` flips the
    parity column of ``j`` inside its block's syndrome.  The confirmation
    value is linear too, so its change does not depend on the rest of
    the key.  A block offers at most ``radius`` units minus the positions
    of ``avoid`` it contains, so any combination of units stays
    correctable for the receiver.
    """
    n = len(key)
    L, s = code.block_len, code.syndrome_len
    taken = np.zeros(max(n // L, 1), dtype=int)
    for p in avoid or ():
        if p // L < taken.size:
            taken[p // L] += 1
    offsets = [0, L // 2, L // 4, 3 * L // 4][:code.radius]
    slots = [(blk, off) for k, off in enumerate(offsets)
             for blk in range(n // L) if code.radius - taken[blk] > k]
    slots.sort()
    spec = ConfirmSpec(point)
    co0 = confirm(spec, key).array
    units = []
    for i in spread_positions(len(slots), count):
        blk, off = slots[i]
        j = blk * L + off
        syn = blk * s + np.flatnonzero(code.parity[:, off])
        co = np.flatnonzero(confirm(spec, key.flip([j])).array ^ co0)
        units.append(KeyUnit(j, syn.astype(np.int64), co.astype(np.int64)))
    return units


def swap_units(mask: BitString, eligible=None, count: int | None = None) -> list[tuple[int, int]]:
    """Disjoint adjacent pairs with opposite mask bits.

    Swapping the bits of such a pair moves one sifted position by one slot
    and leaves the sifted length unchanged.  ``eligible(j)`` may veto the
    pair starting at ``j``.
    """
    arr = mask.array
    out = []
    j = 0
    n = arr.size
    while j < n - 1:
        if arr[j] != arr[j + 1] and (eligible is None or eligible(j)):
            out.append((j, j + 1))
            j += 2
        else:
            j += 1
    if count is not None and len(out) > count:
        pick = np.linspace(0, len(out) - 1, count).round().astype(np.int64)
        out = [out[i] for i in np.unique(pick)]
    return out


def recover_key(code: EcCode, estimate: BitString, uncertain, syndrome: BitString,
                point: int, co_value: BitString,
                cap_bits: int = RECOVERY_CAP_BITS) -> BitString | None:
    """Reconstruct a key from Eve's estimate, the syndrome and the CO value.

    EC first; if the confirmation still disagrees, every assignment of the
    uncertain positions is tried (up to ``2**cap_bits`` of them).
    Returns ``None`` if nothing matches.
    """
    spec = ConfirmSpec(point)
    fixed = ec_correct(code, estimate, syndrome)
    if confirm(spec, fixed) == co_value:
        return fixed
    unc = sorted(uncertain)
    if len(unc) > cap_bits:
        return None
    for w in range(1, len(unc) + 1):
        for flips in itertools.combinations(unc, w):
            cand = ec_correct(code, estimate.flip(flips), syndrome)
            if confirm(spec, cand) == co_value:
                return cand
    return None


def check_preimage(seed: BitString, key: BitString, target: BitString) -> bool:
    return pa_apply(PaSpec(seed, len(target)), key) == target
