"""Searching for a modified message whose public digest collides.

When the digest ``f(m)`` is public, a tag computed for ``m`` is also valid
for any ``m'`` with ``f(m') = f(m)``.  Eve starts from the message she
wants to send and flips small combinations of *units* (sets of bit
positions she is willing to change together) until the digest matches.

Candidates are tried by increasing weight and, within a weight, in
lexicographic order of unit indices, so the first hit is deterministic.
Only the words from the first changeable one onwards are rehashed; the
chaining state of the fixed prefix is computed once.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..bits import BitString
from ..hashing import PublicHashSpec
from ..hashing.public import hash_words_batch, message_words, prefix_state
from ..protocol.wire import WireMessage

__all__ = ["MutationSpace", "ForgeResult", "find_colliding_message", "CHUNK"]

CHUNK = 8192


@dataclass(frozen=True)
class MutationSpace:
    """Messages reachable from ``base_message`` by flipping units.

    Attributes
    ----------
    base_message : WireMessage
    mutable_field : int
        Field that ``mutable_positions`` index into.
    mutable_positions : tuple of int
        Field-relative positions, each a one-bit unit.  Ignored when
        ``units`` is given.
    w_max : int
        Largest number of units flipped at once.
    units : tuple of tuple of int, optional
        Frame-relative bit sets, each flipped as one step.  They may span
        several fields.
    before, after : BitString
        Fixed bits hashed before and after the frame (a salt or nonce
        prefix, neighbouring frames of a transcript).
    """

    base_message: WireMessage
    mutable_field: int = 0
    mutable_positions: tuple = ()
    w_max: int = 3
    units: tuple | None = None
    before: BitString = field(default_factory=lambda: BitString.zeros(0))
    after: BitString = field(default_factory=lambda: BitString.zeros(0))

    def __post_init__(self) -> None:
        if self.w_max < 0:
            raise ValueError("w_max must be non-negative")
        frame_len = len(self.base_message.frame_bits())
        if self.units is None:
            width = len(self.base_message.fields[self.mutable_field])
            pos = tuple(int(p) for p in self.mutable_positions)
            if len(set(pos)) != len(pos):
                raise ValueError("mutable positions must be distinct")
            if any(not 0 <= p < width for p in pos):
                raise ValueError("mutable position outside the field")
            offset = self.base_message.field_offset(self.mutable_field)
            units = tuple((offset + p,) for p in pos)
        else:
            units = tuple(tuple(int(p) for p in u) for u in self.units)
            if any(not 0 <= p < frame_len for u in units for p in u):
                raise ValueError("unit position outside the frame")
        object.__setattr__(self, "_frame_units", units)

    @property
    def frame_units(self) -> tuple:
        return self._frame_units

    @property
    def n_units(self) -> int:
        return len(self._frame_units)

    def ball_size(self) -> int:
        """Number of candidates up to weight ``w_max``."""
        return sum(math.comb(self.n_units, w) for w in range(min(self.w_max, self.n_units) + 1))

    def hash_input(self, chosen=()) -> BitString:
        frame = self.base_message.frame_bits()
        if chosen:
            frame = frame.flip(self._positions(chosen))
        return self.before + frame + self.after

    def _positions(self, chosen) -> list[int]:
        # XOR semantics: a bit named by an even number of units is unchanged.
        counts: dict[int, int] = {}
        for u in chosen:
            for p in self._frame_units[u]:
                counts[p] = counts.get(p, 0) ^ 1
        return [p for p, c in counts.items() if c]

    def apply(self, chosen) -> WireMessage:
        """The base message with the units in ``chosen`` flipped."""
        msg = self.base_message
        if not chosen:
            return msg
        flips = self._positions(chosen)
        frame = msg.frame_bits().flip(flips)
        fields = []
        for i, f in enumerate(msg.fields):
            off = msg.field_offset(i)
            fields.append(BitString(frame.array[off:off + len(f)]))
        return msg.with_fields(fields=tuple(fields))


@dataclass(frozen=True)
class ForgeResult:
    """Outcome of a collision search.

    Attributes
    ----------
    found : bool
    message : WireMessage or None
        Colliding message (untagged copy of the base otherwise).
    weight_used : int or None
        Number of units flipped in the hit.
    candidates_tested : int
    units_used : tuple of int
        Indices of the flipped units.
    """

    found: bool
    message: WireMessage | None
    weight_used: int | None
    candidates_tested: int
    units_used: tuple = ()


def _digest_int(target) -> int:
    if isinstance(target, BitString):
        return target.to_int()
    return int(target)


def find_colliding_message(space: MutationSpace, target_digest, spec: PublicHashSpec,
                           max_candidates: int | None = None) -> ForgeResult:
    """First message in ``space`` whose digest equals ``target_digest``.

    Parameters
    ----------
    space : MutationSpace
    target_digest : BitString or int
        ``spec.z_bits``-bit digest to hit.
    spec : PublicHashSpec
    max_candidates : int, optional
        Stop early after this many candidates.

    Returns
    -------
    ForgeResult
    """
    target = _digest_int(target_digest)
    base_bits = space.hash_input()
    n_bits = len(base_bits)
    words = message_words(base_bits)
    offset = len(space.before)
    units = space.frame_units
    tested = 0

    # Weight 0.
    tested += 1
    if int(hash_words_batch(spec, words[None, :], n_bits)[0]) == target:
        return ForgeResult(True, space.base_message, 0, tested, ())
    if not units or space.w_max == 0:
        return ForgeResult(False, None, None, tested)

    abs_units = [np.asarray(u, dtype=np.int64) + offset for u in units]
    lo = min(int(u.min()) for u in abs_units if u.size) // 64
    tail = words[lo:]
    state0 = prefix_state(spec, words[:lo])
    delta = np.zeros((len(units), tail.size), dtype=np.uint64)
    for k, u in enumerate(abs_units):
        if u.size:
            np.bitwise_xor.at(delta[k], u // 64 - lo,
                              np.left_shift(np.uint64(1), (63 - u % 64).astype(np.uint64)))

    for w in range(1, min(space.w_max, len(units)) + 1):
        combos = itertools.combinations(range(len(units)), w)
        while True:
            chunk = list(itertools.islice(combos, CHUNK))
            if not chunk:
                break
            if max_candidates is not None:
                chunk = chunk[:max(0, max_candidates - tested)]
                if not chunk:
                    return ForgeResult(False, None, None, tested)
            idx = np.array(chunk, dtype=np.int64)
            cand = np.bitwise_xor.reduce(delta[idx], axis=1) ^ tail
            state = np.full(len(chunk), state0, dtype=np.uint64)
            digests = hash_words_batch(spec, cand, n_bits, state=state)
            hits = np.flatnonzero(digests == np.uint64(target))
            if hits.size:
                first = int(hits[0])
                tested += first + 1
                chosen = tuple(chunk[first])
                return ForgeResult(True, space.apply(chosen), w, tested, chosen)
            tested += len(chunk)
    return ForgeResult(False, None, None, tested)
