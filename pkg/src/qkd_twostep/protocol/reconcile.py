"""Sifting, error correction, confirmation and privacy amplification.

Error correction uses a small published set of systematic linear block
codes.  Each code is a parity-check matrix ``H`` (``s x 16``) built by a
seeded greedy search so that any ``2r`` columns are linearly independent,
which makes every error pattern of weight at most ``r`` per block
correctable.  Decoding is a lookup of the minimum-weight coset leader.

Confirmation is the polynomial AU2 hash with a random 32-bit point.
Privacy amplification is Toeplitz hashing: with seed ``s`` of length
``r + n - 1``, output bit ``i`` is ``sum_j s[i - j + n - 1] k[j] mod 2``,
i.e. a window of the GF(2) polynomial product ``s(x) k(x)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources

import numpy as np

from ..bits import BitString
from ..hashing import Au2FamilySpec, poly_au2_int
from ..quantum import EMPTY

__all__ = [
    "sift_mask",
    "apply_mask",
    "EcCode",
    "ec_codes",
    "construct_code",
    "format_code_table",
    "select_code",
    "ec_syndrome",
    "ec_correct",
    "ConfirmSpec",
    "confirm",
    "CO_BITS",
    "CO_EPSILON",
    "PaSpec",
    "pa_apply",
    "pa_output_length",
    "pa_margin",
    "binary_entropy",
    "encode_error_rate",
    "decode_error_rate",
]

_CODES_FILE = "ec_codes.txt"
_MARGIN_FILE = "pa_margins.txt"
CODE_TABLE_VERSION = 1
# (block_len, syndrome_len, radius, search seed) of the published set.
CODE_PARAMETERS = ((16, 5, 1, 1), (16, 6, 1, 2), (16, 8, 2, 3))
# Upper ends of the error-rate ranges served by each code, in order.
CODE_THRESHOLDS = (0.02, 0.05, 0.125)

CO_BITS = 32
_CO_MAX_KEY_BITS = 1 << 16
CO_EPSILON = Au2FamilySpec.for_message_bits(CO_BITS, _CO_MAX_KEY_BITS).epsilon_prime


# sifting -------------------------------------------------------------
def sift_mask(bases_a: np.ndarray, bases_b: np.ndarray) -> BitString:
    """1 where both bases are present and equal; empty never matches."""
    a = np.asarray(bases_a, dtype=np.int8)
    b = np.asarray(bases_b, dtype=np.int8)
    if a.shape != b.shape:
        raise ValueError("basis strings differ in length")
    return BitString((a == b) & (a != EMPTY) & (b != EMPTY))


def apply_mask(raw: np.ndarray, mask: BitString) -> BitString:
    """Sifted key: raw values at mask positions, empty slots read as 0."""
    raw = np.asarray(raw, dtype=np.int8)
    if raw.size != len(mask):
        raise ValueError("raw key and mask differ in length")
    kept = raw[mask.array.astype(bool)]
    return BitString(np.where(kept == EMPTY, 0, kept))


# error correction ----------------------------------------------------
@dataclass(frozen=True)
class EcCode:
    """A published block code.

    Attributes
    ----------
    index : int
        1-based position in the published set.
    parity : ndarray of uint8, shape (syndrome_len, block_len)
    radius : int
        Every error pattern of at most this weight per block is corrected.
    """

    index: int
    parity: np.ndarray
    radius: int

    @property
    def block_len(self) -> int:
        return self.parity.shape[1]

    @property
    def syndrome_len(self) -> int:
        return self.parity.shape[0]

    def n_blocks(self, key_bits: int) -> int:
        return -(-key_bits // self.block_len)

    def syndrome_bits(self, key_bits: int) -> int:
        return self.n_blocks(key_bits) * self.syndrome_len

    @property
    def coset_leaders(self) -> np.ndarray:
        return _coset_leaders(self.parity.tobytes(), self.parity.shape)


def _column_ints(parity: np.ndarray) -> list[int]:
    weights = 1 << np.arange(parity.shape[0] - 1, -1, -1)
    return [int(v) for v in weights @ parity]


def _correctable(cols: list[int], radius: int) -> bool:
    seen = set()
    for w in range(radius + 1):
        for combo in itertools.combinations(cols, w):
            s = 0
            for c in combo:
                s ^= c
            if s in seen:
                return False
            seen.add(s)
    return True


def construct_code(block_len: int, syndrome_len: int, radius: int, seed: int) -> np.ndarray:
    """Seeded greedy search for a systematic parity-check matrix.

    Columns are added one at a time (identity columns last) and a
    candidate is accepted only if it is not the sum of ``2r - 1`` or fewer
    accepted columns.
    """
    rng = np.random.default_rng(seed)
    ident = [1 << (syndrome_len - 1 - i) for i in range(syndrome_len)]
    n_info = block_len - syndrome_len
    for _ in range(10_000):
        cols = list(ident)
        for v in rng.permutation(np.arange(1, 1 << syndrome_len)).tolist():
            if len(cols) == block_len:
                break
            if all(_span_avoids(v, cols, 2 * radius - 1)):
                cols.append(v)
        if len(cols) == block_len:
            ordered = cols[syndrome_len:] + cols[:syndrome_len]
            assert len(ordered) == n_info + syndrome_len
            parity = np.array([[(c >> (syndrome_len - 1 - r)) & 1 for c in ordered]
                               for r in range(syndrome_len)], dtype=np.uint8)
            if _correctable(_column_ints(parity), radius):
                return parity
    raise RuntimeError("code search did not converge")


def _span_avoids(v: int, cols: list[int], depth: int):
    for w in range(depth + 1):
        for combo in itertools.combinations(cols, w):
            s = v
            for c in combo:
                s ^= c
            yield s != 0


def format_code_table(codes: list[EcCode]) -> str:
    lines = [
        f"# error-correction code set, table version {CODE_TABLE_VERSION}",
        "# 'code <index> <block_len> <syndrome_len> <radius>' then the parity-check rows",
    ]
    for code in codes:
        lines.append(f"code {code.index} {code.block_len} {code.syndrome_len} {code.radius}")
        lines.extend("".join(str(b) for b in row) for row in code.parity)
    return "\n".join(lines) + "\n"


@lru_cache(maxsize=1)
def ec_codes() -> tuple[EcCode, ...]:
    """The published code set, loaded from package data."""
    text = resources.files("qkd_twostep.data").joinpath(_CODES_FILE).read_text()
    codes, rows, head = [], [], None
    for line in text.splitlines() + ["code"]:
        if not line.strip() or line.startswith("#"):
            continue
        if line.startswith("code"):
            if head is not None:
                parity = np.array([[int(c) for c in r] for r in rows], dtype=np.uint8)
                parity.setflags(write=False)
                codes.append(EcCode(head[0], parity, head[3]))
            parts = line.split()
            head = tuple(int(x) for x in parts[1:]) if len(parts) > 1 else None
            rows = []
        else:
            rows.append(line.strip())
    return tuple(codes)


@lru_cache(maxsize=None)
def _coset_leaders(parity_bytes: bytes, shape: tuple[int, int]) -> np.ndarray:
    s, n = shape
    parity = np.frombuffer(parity_bytes, dtype=np.uint8).reshape(shape)
    patterns = np.arange(1 << n, dtype=np.int64)
    bits = ((patterns[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.int64)
    syn = (bits @ parity.T.astype(np.int64)) % 2 @ (1 << np.arange(s - 1, -1, -1))
    weight = bits.sum(axis=1)
    # Lowest weight first, then lexicographic by pattern value.
    order = np.lexsort((patterns, weight))
    leaders = np.full(1 << s, -1, dtype=np.int64)
    seen_syn, first = np.unique(syn[order], return_index=True)
    leaders[seen_syn] = patterns[order][first]
    out = ((leaders[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.uint8)
    out.setflags(write=False)
    return out


def select_code(error_estimate: float) -> EcCode:
    """Weakest published code whose range covers ``error_estimate``."""
    codes = ec_codes()
    for code, limit in zip(codes, CODE_THRESHOLDS):
        if error_estimate <= limit:
            return code
    return codes[-1]


def _blocks(code: EcCode, key: BitString) -> np.ndarray:
    bits = key.array
    pad = -bits.size % code.block_len
    if pad:
        bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    return bits.reshape(-1, code.block_len)


def ec_syndrome(code: EcCode, key: BitString) -> BitString:
    """Per-block syndromes of the zero-padded key, concatenated."""
    syn = (_blocks(code, key).astype(np.int64) @ code.parity.T.astype(np.int64)) % 2
    return BitString(syn.ravel())


def ec_correct(code: EcCode, key: BitString, syndrome: BitString) -> BitString:
    """Move ``key`` to the codeword coset given by ``syndrome``.

    Each block is corrected by the minimum-weight coset leader of the
    syndrome difference.  Beyond the radius the decoder silently
    miscorrects; the confirmation step catches that.
    """
    blocks = _blocks(code, key)
    if len(syndrome) != blocks.shape[0] * code.syndrome_len:
        raise ValueError("syndrome length does not match the key")
    own = (blocks.astype(np.int64) @ code.parity.T.astype(np.int64)) % 2
    diff = own ^ syndrome.array.reshape(-1, code.syndrome_len)
    index = diff @ (1 << np.arange(code.syndrome_len - 1, -1, -1))
    fixed = blocks ^ code.coset_leaders[index]
    return BitString(fixed.ravel()[:len(key)])


# confirmation ----------------------------------------------------------
@dataclass(frozen=True)
class ConfirmSpec:
    """Confirmation function: the AU2 member at ``point``."""

    point: int
    width: int = CO_BITS


def confirm(spec: ConfirmSpec, key: BitString) -> BitString:
    if len(key) > _CO_MAX_KEY_BITS:
        raise ValueError("key longer than the confirmation family accepts")
    family = Au2FamilySpec.for_message_bits(spec.width, max(len(key), 1))
    return BitString.from_int(poly_au2_int(family, spec.point, key), spec.width)


# privacy amplification -------------------------------------------------
@dataclass(frozen=True)
class PaSpec:
    """Toeplitz hash with ``r`` output bits.

    Attributes
    ----------
    seed : BitString
        Diagonal values, length ``r + n - 1`` for ``n``-bit keys.
    r : int
    """

    seed: BitString
    r: int

    def key_bits(self) -> int:
        return len(self.seed) - self.r + 1 if self.r else 0

    def matrix(self, n: int) -> np.ndarray:
        """Explicit ``r x n`` Toeplitz matrix (for inspection and tests)."""
        s = self.seed.array
        i = np.arange(self.r)[:, None]
        j = np.arange(n)[None, :]
        return s[i - j + n - 1]


def pa_apply(spec: PaSpec, key: BitString) -> BitString:
    """Compress ``key`` to ``spec.r`` bits with the Toeplitz matrix.

    Raises
    ------
    ValueError
        If the seed length does not fit the key length.
    """
    n = len(key)
    if spec.r == 0:
        return BitString.zeros(0)
    if len(spec.seed) != spec.r + n - 1:
        raise ValueError(
            f"seed of {len(spec.seed)} bits does not fit a {n}-bit key and r={spec.r}")
    prod = np.convolve(spec.seed.array.astype(np.int32), key.array.astype(np.int32))
    return BitString((prod[n - 1:n - 1 + spec.r] & 1).astype(np.uint8))


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)


@lru_cache(maxsize=1)
def _margins() -> tuple[tuple[int, int], ...]:
    text = resources.files("qkd_twostep.data").joinpath(_MARGIN_FILE).read_text()
    rows = []
    for line in text.splitlines():
        if line.strip() and not line.startswith("#"):
            lo, margin = (int(x) for x in line.split())
            rows.append((lo, margin))
    return tuple(sorted(rows))


def pa_margin(n: int) -> int:
    """Safety margin subtracted from the PA output for an ``n``-bit key."""
    margin = 0
    for lo, m in _margins():
        if n >= lo:
            margin = m
    return margin


def pa_output_length(n: int, error_rate: float) -> int:
    """``max(0, floor(n (1 - h2(eps))) - margin(n))``."""
    return max(0, math.floor(n * (1 - binary_entropy(error_rate))) - pa_margin(n))


# error-rate field ------------------------------------------------------
def encode_error_rate(eps: float) -> BitString:
    """16-bit fixed point, ``round(eps * 2^16)`` saturated at 0xFFFF."""
    q = min(0xFFFF, max(0, round(eps * 65536)))
    return BitString.from_int(q, 16)


def decode_error_rate(field: BitString) -> float:
    if len(field) != 16:
        raise ValueError("error-rate field must be 16 bits")
    return field.to_int() / 65536
