"""Immutable bit strings backed by numpy.

Every message, key and digest in the package is a :class:`BitString`.
Conversions to bytes are MSB-first with the final byte zero-padded on the
right, which is the convention used by the wire format and by the public
hash.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

__all__ = ["BitString"]


class BitString:
    """A fixed-length, immutable sequence of bits.

    Parameters
    ----------
    bits : iterable of int or array_like
        Values must be 0 or 1.

    Examples
    --------
    >>> b = BitString.from_str("1011")
    >>> b.to_bytes()
    b'\\xb0'
    >>> (b ^ BitString.from_str("0011")).to_str()
    '1000'
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int] | np.ndarray = ()) -> None:
        if not isinstance(bits, (np.ndarray, list, tuple)):
            bits = list(bits)
        arr = np.array(bits, dtype=np.uint8).reshape(-1)
        if arr.size and arr.max() > 1:
            raise ValueError("bit values must be 0 or 1")
        arr.setflags(write=False)
        self._bits = arr

    # construction -----------------------------------------------------
    @classmethod
    def _wrap(cls, arr: np.ndarray) -> "BitString":
        # Trusted fast path: caller guarantees a fresh 0/1 uint8 array.
        out = cls.__new__(cls)
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        arr.setflags(write=False)
        out._bits = arr
        return out

    @classmethod
    def zeros(cls, n: int) -> "BitString":
        return cls._wrap(np.zeros(n, dtype=np.uint8))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "BitString":
        """Uniformly random bit string of length ``n``."""
        return cls._wrap(rng.integers(0, 2, size=n, dtype=np.uint8))

    @classmethod
    def from_str(cls, text: str) -> "BitString":
        return cls(int(c) for c in text if c in "01")

    @classmethod
    def from_int(cls, value: int, n: int) -> "BitString":
        """Big-endian ``n``-bit representation of a non-negative integer."""
        if value < 0 or value >> n:
            raise ValueError(f"{value} does not fit in {n} bits")
        raw = value.to_bytes((n + 7) // 8, "big")
        bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))
        return cls._wrap(bits[len(bits) - n:].copy())

    @classmethod
    def from_bytes(cls, data: bytes, n: int | None = None) -> "BitString":
        """Unpack bytes MSB-first, keeping the first ``n`` bits."""
        bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
        if n is not None:
            if n > bits.size:
                raise ValueError("not enough bytes for requested length")
            bits = bits[:n]
        return cls._wrap(bits.copy())

    @classmethod
    def concat(cls, parts: Sequence["BitString"]) -> "BitString":
        if not parts:
            return cls.zeros(0)
        return cls._wrap(np.concatenate([p._bits for p in parts]))

    # views ------------------------------------------------------------
    @property
    def array(self) -> np.ndarray:
        """Read-only uint8 view of the bits."""
        return self._bits

    def __len__(self) -> int:
        return int(self._bits.size)

    def __iter__(self):
        return iter(self._bits.tolist())

    def __getitem__(self, idx):
        if isinstance(idx, (int, np.integer)):
            return int(self._bits[idx])
        return BitString._wrap(self._bits[idx].copy())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitString):
            return NotImplemented
        return self._bits.size == other._bits.size and bool(
            np.array_equal(self._bits, other._bits))

    def __hash__(self) -> int:
        return hash((self._bits.size, self._bits.tobytes()))

    def __repr__(self) -> str:
        text = self.to_str()
        if len(text) > 40:
            text = text[:32] + f"...({len(self)} bits)"
        return f"BitString('{text}')"

    # operations -------------------------------------------------------
    def __add__(self, other: "BitString") -> "BitString":
        return BitString._wrap(np.concatenate([self._bits, other._bits]))

    def __xor__(self, other: "BitString") -> "BitString":
        if len(self) != len(other):
            raise ValueError("xor of bit strings with different lengths")
        return BitString._wrap(self._bits ^ other._bits)

    def flip(self, positions: Iterable[int]) -> "BitString":
        """Return a copy with the bits at ``positions`` inverted."""
        arr = self._bits.copy()
        idx = np.fromiter(positions, dtype=np.int64)
        np.bitwise_xor.at(arr, idx, 1)
        return BitString._wrap(arr)

    def weight(self) -> int:
        return int(self._bits.sum(dtype=np.int64))

    def hamming(self, other: "BitString") -> int:
        if len(self) != len(other):
            raise ValueError("hamming distance needs equal lengths")
        return int(np.count_nonzero(self._bits != other._bits))

    def select(self, mask: "BitString | np.ndarray") -> "BitString":
        """Keep the bits where ``mask`` is 1, preserving order."""
        m = mask.array if isinstance(mask, BitString) else np.asarray(mask)
        return BitString._wrap(self._bits[m.astype(bool)])

    # conversions ------------------------------------------------------
    def to_bytes(self) -> bytes:
        return np.packbits(self._bits).tobytes()

    def to_int(self) -> int:
        if not len(self):
            return 0
        return int.from_bytes(self.to_bytes(), "big") >> (-len(self) % 8)

    def to_str(self) -> str:
        return "".join("1" if b else "0" for b in self._bits.tolist())
