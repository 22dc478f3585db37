"""The public, keyless hash ``f`` used as the first step of two-step tags.

The construction is a simple Merkle-Damgard style chain over 64-bit words:

1. pad the message with zero bits to a multiple of 64 and split it into
   big-endian words;
2. starting from the public ``mixer_seed``, absorb each word with
   ``state = mix64((state ^ word) + GOLDEN)``;
3. absorb the message bit length the same way, so messages that differ
   only in trailing zero padding hash differently;
4. output the top ``z_bits`` bits of the final state.

``mix64`` is the splitmix64 finaliser.  Everything is public, so anyone
(including the adversary) can evaluate ``f``; the batched variant hashes
many candidate messages at once for collision search.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bits import BitString

__all__ = [
    "DEFAULT_MIXER_SEED",
    "PublicHashSpec",
    "public_hash",
    "public_hash_int",
    "message_words",
    "hash_words_batch",
    "prefix_state",
]

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
DEFAULT_MIXER_SEED = 0x243F6A8885A308D3  # hex digits of pi
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


@dataclass(frozen=True)
class PublicHashSpec:
    """Parameters of the public hash.

    Attributes
    ----------
    z_bits : int
        Digest length, 1 to 64.
    mixer_seed : int
        Public 64-bit chaining value.
    """

    z_bits: int
    mixer_seed: int = DEFAULT_MIXER_SEED

    def __post_init__(self) -> None:
        if not 1 <= self.z_bits <= 64:
            raise ValueError("z_bits must be between 1 and 64")
        if not 0 <= self.mixer_seed <= MASK64:
            raise ValueError("mixer_seed must be a 64-bit value")


def _mix64(x: int) -> int:
    x ^= x >> 30
    x = (x * _M1) & MASK64
    x ^= x >> 27
    x = (x * _M2) & MASK64
    x ^= x >> 31
    return x


def message_words(message: BitString) -> np.ndarray:
    """Zero-pad to a multiple of 64 bits and return big-endian uint64 words."""
    bits = message.array
    pad = -bits.size % 64
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    return np.frombuffer(np.packbits(bits).tobytes(), dtype=">u8").astype(np.uint64)


def public_hash_int(spec: PublicHashSpec, message: BitString) -> int:
    """Digest of ``message`` as an integer in ``[0, 2^z_bits)``."""
    state = spec.mixer_seed
    for word in message_words(message).tolist():
        state = _mix64(((state ^ word) + GOLDEN) & MASK64)
    state = _mix64(((state ^ len(message)) + GOLDEN) & MASK64)
    return state >> (64 - spec.z_bits)


def public_hash(spec: PublicHashSpec, message: BitString) -> BitString:
    """Digest of ``message`` as a ``z_bits``-long bit string."""
    return BitString.from_int(public_hash_int(spec, message), spec.z_bits)


def _mix64_vec(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(_M1)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(_M2)
    return x ^ (x >> np.uint64(31))


def hash_words_batch(spec: PublicHashSpec, words: np.ndarray, n_bits: int,
                     state: np.ndarray | None = None) -> np.ndarray:
    """Hash many equal-length messages given as rows of 64-bit words.

    Parameters
    ----------
    spec : PublicHashSpec
    words : ndarray of uint64, shape (batch, n_words)
        Padded message words, one message per row.
    n_bits : int
        Unpadded message length shared by every row.
    state : ndarray of uint64, optional
        Chaining state after a common prefix of words that was hashed
        separately; ``words`` then holds only the remaining words.

    Returns
    -------
    ndarray of uint64
        Digests, one per row.
    """
    words = np.asarray(words, dtype=np.uint64)
    if state is None:
        state = np.full(words.shape[0], spec.mixer_seed, dtype=np.uint64)
    golden = np.uint64(GOLDEN)
    with np.errstate(over="ignore"):
        for j in range(words.shape[1]):
            state = _mix64_vec((state ^ words[:, j]) + golden)
        state = _mix64_vec((state ^ np.uint64(n_bits)) + golden)
    return state >> np.uint64(64 - spec.z_bits)


def prefix_state(spec: PublicHashSpec, words: np.ndarray) -> int:
    """Chaining state after absorbing ``words`` (no length finalisation)."""
    state = spec.mixer_seed
    for word in np.asarray(words, dtype=np.uint64).tolist():
        state = _mix64(((state ^ word) + GOLDEN) & MASK64)
    return state
