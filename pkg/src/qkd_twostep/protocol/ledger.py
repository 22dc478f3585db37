"""Pre-shared key pool with a one-way cursor."""

from __future__ import annotations

from collections import Counter

from ..bits import BitString
from ..hashing import AuthScheme, TagKey

__all__ = ["KeyLedger", "LedgerExhausted"]


class LedgerExhausted(RuntimeError):
    """The pool has fewer unused bits than requested."""


class KeyLedger:
    """Issues pre-shared key bits exactly once, in order.

    Alice and Bob each hold a ledger over the same pool; because both draw
    in the same order they obtain the same keys without communicating.

    Parameters
    ----------
    pool : BitString
        The pre-shared secret.
    """

    def __init__(self, pool: BitString) -> None:
        self._pool = pool
        self._cursor = 0
        self.consumed = Counter()

    @property
    def cursor(self) -> int:
        return self._cursor

    @property
    def remaining(self) -> int:
        return len(self._pool) - self._cursor

    def draw(self, n_bits: int, purpose: str = "unspecified") -> BitString:
        """Take the next ``n_bits`` of the pool.

        Raises
        ------
        LedgerExhausted
            If fewer than ``n_bits`` bits remain; the cursor does not move.
        """
        if n_bits < 0:
            raise ValueError("cannot draw a negative number of bits")
        if n_bits > self.remaining:
            raise LedgerExhausted(
                f"need {n_bits} bits for {purpose}, {self.remaining} left")
        out = self._pool[self._cursor:self._cursor + n_bits]
        self._cursor += n_bits
        self.consumed[purpose] += n_bits
        return out

    def draw_tag_key(self, scheme: AuthScheme, purpose: str = "tag",
                     session_secret: BitString | None = None) -> TagKey:
        """Key material for one tag under ``scheme``."""
        secret = session_secret
        n_secret = scheme.per_message_secret_bits
        if n_secret:
            secret = self.draw(n_secret, purpose)
        su2 = scheme.su2.key_from_bits(self.draw(scheme.su2.key_bits, purpose))
        return TagKey(su2, secret)
