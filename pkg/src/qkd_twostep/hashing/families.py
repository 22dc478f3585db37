"""Keyed hash families: the SU2 outer hash and the polynomial AU2 hash.

SU2 family
    ``h_{a,b}(x) = trunc_t(a * x) xor b`` with ``a`` ranging over the whole
    field GF(2^w) and ``b`` over ``t``-bit strings.  The field width is
    ``w = max(z, t)`` so that the digest always embeds into the field and
    the truncation never has to invent bits.  For ``x1 != x2`` the product
    ``a * (x1 xor x2)`` is uniform over the field, hence the family is
    exactly strongly universal.

Polynomial AU2 family
    The message is cut into ``z``-bit blocks ``c_1 ... c_d`` where ``c_1``
    is the message bit length and the rest are the zero-padded data.  The
    digest is ``c_1 S^(d-1) + c_2 S^(d-2) + ... + c_d`` (Horner order).
    Two distinct messages give distinct nonzero difference polynomials of
    degree at most ``max_blocks - 1``, so at most ``max_blocks - 1`` points
    ``S`` collide them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..bits import BitString
from .gf2 import GF2n

__all__ = [
    "Su2Key",
    "Su2FamilySpec",
    "su2_eval",
    "Au2FamilySpec",
    "poly_au2_eval",
    "poly_au2_int",
    "poly_blocks",
]


@lru_cache(maxsize=None)
def _field(width: int) -> GF2n:
    return GF2n(width)


@dataclass(frozen=True)
class Su2FamilySpec:
    """Shape of the outer SU2 family.

    Attributes
    ----------
    z_bits : int
        Width of the digests fed to the family.
    t_bits : int
        Tag width.
    """

    z_bits: int
    t_bits: int

    def __post_init__(self) -> None:
        if self.z_bits < 1 or self.t_bits < 1:
            raise ValueError("widths must be positive")

    @property
    def field_bits(self) -> int:
        return max(self.z_bits, self.t_bits)

    @property
    def key_bits(self) -> int:
        return self.field_bits + self.t_bits

    def key_from_bits(self, bits: BitString) -> "Su2Key":
        if len(bits) != self.key_bits:
            raise ValueError(f"SU2 key needs {self.key_bits} bits, got {len(bits)}")
        w = self.field_bits
        return Su2Key(self, bits[:w].to_int(), bits[w:].to_int())

    def all_keys(self):
        """Iterate over every key of the family (small widths only)."""
        for a in range(1 << self.field_bits):
            for b in range(1 << self.t_bits):
                yield Su2Key(self, a, b)


@dataclass(frozen=True)
class Su2Key:
    """One member ``(a, b)`` of the SU2 family."""

    family: Su2FamilySpec
    a: int
    b: int

    def __post_init__(self) -> None:
        if not 0 <= self.a < 1 << self.family.field_bits:
            raise ValueError("multiplier outside the field")
        if not 0 <= self.b < 1 << self.family.t_bits:
            raise ValueError("offset wider than the tag")


def su2_int(key: Su2Key, digest: int) -> int:
    field = _field(key.family.field_bits)
    product = field.mul(key.a, digest)
    return (product & ((1 << key.family.t_bits) - 1)) ^ key.b


def su2_eval(key: Su2Key, digest: BitString) -> BitString:
    """Tag ``trunc_t(a * digest) xor b``.

    Raises
    ------
    ValueError
        If the digest length differs from the family's ``z_bits``.
    """
    if len(digest) != key.family.z_bits:
        raise ValueError(
            f"digest has {len(digest)} bits, family expects {key.family.z_bits}")
    return BitString.from_int(su2_int(key, digest.to_int()), key.family.t_bits)


@dataclass(frozen=True)
class Au2FamilySpec:
    """Polynomial-evaluation AU2 family over GF(2^z_bits).

    Attributes
    ----------
    z_bits : int
        Field width and digest width.
    max_blocks : int
        Largest admissible block count, length block included.
    """

    z_bits: int
    max_blocks: int

    def __post_init__(self) -> None:
        if not 1 <= self.z_bits <= 256:
            raise ValueError("z_bits must be between 1 and 256")
        if self.max_blocks < 1:
            raise ValueError("max_blocks must be positive")
        if self.max_message_bits >= 1 << self.z_bits:
            raise ValueError("message lengths would not fit in the length block")

    @property
    def max_message_bits(self) -> int:
        return (self.max_blocks - 1) * self.z_bits

    @property
    def epsilon_prime(self):
        from fractions import Fraction
        return Fraction(self.max_blocks - 1, 1 << self.z_bits)

    @classmethod
    def for_message_bits(cls, z_bits: int, message_bits: int) -> "Au2FamilySpec":
        """Smallest family of width ``z_bits`` that accepts ``message_bits``."""
        return cls(z_bits, 1 + -(-message_bits // z_bits))


def poly_blocks(family: Au2FamilySpec, message: BitString) -> list[int]:
    """Length-prefixed block sequence of ``message`` (injective)."""
    z = family.z_bits
    n = len(message)
    if n > family.max_message_bits:
        raise ValueError(
            f"message of {n} bits exceeds capacity {family.max_message_bits}")
    bits = message.array
    pad = -n % z
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    blocks = [n]
    if bits.size:
        weights = [1 << (z - 1 - i) for i in range(z)]
        if z <= 62:
            w = np.array(weights, dtype=np.int64)
            blocks.extend(int(v) for v in bits.reshape(-1, z).astype(np.int64) @ w)
        else:
            for row in bits.reshape(-1, z):
                blocks.append(BitString._wrap(row.copy()).to_int())
    return blocks


def poly_au2_int(family: Au2FamilySpec, point: int, message: BitString) -> int:
    if not 0 <= point < 1 << family.z_bits:
        raise ValueError("evaluation point outside the field")
    field = _field(family.z_bits)
    acc = 0
    for block in poly_blocks(family, message):
        acc = field.mul(acc, point) ^ block
    return acc


def poly_au2_eval(family: Au2FamilySpec, point: int, message: BitString) -> BitString:
    """Digest of ``message`` under the family member selected by ``point``."""
    return BitString.from_int(poly_au2_int(family, point, message), family.z_bits)
