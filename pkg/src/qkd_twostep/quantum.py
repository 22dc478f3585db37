"""Classical simulation of ideal BB84 conjugate coding.

A prepared single-photon state is fully described by its basis and bit,
so a quantum frame is just two arrays plus a loss mask.  Measuring in the
preparation basis returns the prepared bit; measuring in the conjugate
basis returns a fresh uniform bit.  Frames and memory handles can be
measured once, mirroring the no-cloning constraint the attacks respect.

Raw keys and basis strings are ``int8`` arrays.  ``EMPTY`` (-1) marks a
slot without a detection: Bob's raw key gets ``EMPTY`` for lost photons
and the protocol sets his basis to ``EMPTY`` there too.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "EMPTY",
    "RECTILINEAR",
    "DIAGONAL",
    "ChannelParams",
    "QuantumFrame",
    "MemoryHandle",
    "FrameConsumedError",
    "random_bits",
    "prepare",
    "measure",
    "memory_store",
    "memory_measure",
    "intercept_resend",
]

EMPTY = -1
RECTILINEAR = 0
DIAGONAL = 1


class FrameConsumedError(RuntimeError):
    """A frame or memory handle was measured (or stored) a second time."""


@dataclass(frozen=True)
class ChannelParams:
    """Physical imperfections of a quantum channel plus detector.

    Attributes
    ----------
    loss_prob : float
        Per-slot probability that no detection happens.
    flip_prob : float
        Per-slot probability that a detected bit is inverted.
    """

    loss_prob: float = 0.0
    flip_prob: float = 0.0

    def __post_init__(self) -> None:
        for name in ("loss_prob", "flip_prob"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")


IDEAL = ChannelParams()


def random_bits(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` uniform bits as an ``int8`` array (raw keys and bases)."""
    return rng.integers(0, 2, size=n, dtype=np.int8)


class QuantumFrame:
    """A train of ``N`` prepared qubits travelling on a quantum channel.

    Parameters
    ----------
    bases, bits : array_like of {0, 1}
    lost : array_like of bool, optional
        Slots dropped by the channel.
    """

    __slots__ = ("bases", "bits", "lost", "_consumed")

    def __init__(self, bases, bits, lost=None) -> None:
        self.bases = np.asarray(bases, dtype=np.int8).copy()
        self.bits = np.asarray(bits, dtype=np.int8).copy()
        if self.bases.shape != self.bits.shape:
            raise ValueError("bases and bits must have equal length")
        if lost is None:
            lost = np.zeros(self.bases.shape, dtype=bool)
        self.lost = np.asarray(lost, dtype=bool).copy()
        for arr in (self.bases, self.bits, self.lost):
            arr.setflags(write=False)
        self._consumed = False

    def __len__(self) -> int:
        return int(self.bases.size)

    def __repr__(self) -> str:
        state = "consumed" if self._consumed else "live"
        return f"QuantumFrame(N={len(self)}, lost={int(self.lost.sum())}, {state})"

    @property
    def consumed(self) -> bool:
        return self._consumed

    def slots(self) -> list:
        """Per-slot ``(basis, bit)`` pairs, or ``None`` for lost slots."""
        return [None if l else (int(b), int(v))
                for b, v, l in zip(self.bases, self.bits, self.lost)]

    def _take(self) -> None:
        if self._consumed:
            raise FrameConsumedError("quantum frame already measured")
        self._consumed = True


def prepare(raw: np.ndarray, bases: np.ndarray) -> QuantumFrame:
    """Encode ``raw`` bits in ``bases`` (slot ``k`` is ``(bases_k, raw_k)``).

    Raises
    ------
    ValueError
        On length mismatch or an ``EMPTY`` raw value.
    """
    raw = np.asarray(raw, dtype=np.int8)
    bases = np.asarray(bases, dtype=np.int8)
    if raw.shape != bases.shape:
        raise ValueError("raw key and bases differ in length")
    if np.any(raw == EMPTY) or np.any(bases == EMPTY):
        raise ValueError("cannot prepare a state from an empty slot")
    return QuantumFrame(bases, raw)


def _readout(bases_in, bits_in, lost_in, bases, params, rng):
    bases = np.asarray(bases, dtype=np.int8)
    if bases.shape != bases_in.shape:
        raise ValueError("measurement bases differ in length from the frame")
    n = bases.size
    # Fixed draw order keeps runs reproducible whatever the parameters.
    loss_draw = rng.random(n) < params.loss_prob
    flip_draw = rng.random(n) < params.flip_prob
    coin = rng.integers(0, 2, size=n, dtype=np.int8)
    out = np.where(bases == bases_in, bits_in, coin).astype(np.int8)
    out ^= flip_draw.astype(np.int8)
    out[lost_in | loss_draw] = EMPTY
    return out


def measure(frame: QuantumFrame, bases: np.ndarray, params: ChannelParams,
            rng: np.random.Generator) -> np.ndarray:
    """Measure every slot of ``frame`` in ``bases``.

    Loss is decided before the flip, so a lost slot never reports a bit.

    Raises
    ------
    FrameConsumedError
        If the frame was already measured or stored.
    """
    frame._take()
    return _readout(frame.bases, frame.bits, frame.lost, bases, params, rng)


class MemoryHandle:
    """A frame parked in a perfect quantum memory."""

    __slots__ = ("_frame", "_consumed", "error_prob")

    def __init__(self, frame: QuantumFrame, error_prob: float = 0.0) -> None:
        self._frame = frame
        self._consumed = False
        self.error_prob = error_prob

    def __len__(self) -> int:
        return len(self._frame)


def memory_store(frame: QuantumFrame, error_prob: float = 0.0) -> MemoryHandle:
    """Move ``frame`` into quantum memory.

    Parameters
    ----------
    frame : QuantumFrame
    error_prob : float, optional
        Residual readout error of the memory; the attacks use 0.
    """
    frame._take()
    return MemoryHandle(frame, error_prob)


def memory_measure(handle: MemoryHandle, bases: np.ndarray,
                   rng: np.random.Generator) -> np.ndarray:
    """Measure a stored frame; same rules as :func:`measure` without loss."""
    if handle._consumed:
        raise FrameConsumedError("quantum memory already read out")
    handle._consumed = True
    f = handle._frame
    return _readout(f.bases, f.bits, f.lost, bases,
                    ChannelParams(0.0, handle.error_prob), rng)


def intercept_resend(frame: QuantumFrame, eve_bases: np.ndarray,
                     rng: np.random.Generator) -> tuple[np.ndarray, QuantumFrame]:
    """Measure in ``eve_bases`` and resend the results in the same bases.

    Lost slots stay lost in the resent frame.
    """
    eve_raw = measure(frame, eve_bases, IDEAL, rng)
    lost = eve_raw == EMPTY
    resent = QuantumFrame(np.asarray(eve_bases, dtype=np.int8),
                          np.where(lost, 0, eve_raw), lost)
    return eve_raw, resent
