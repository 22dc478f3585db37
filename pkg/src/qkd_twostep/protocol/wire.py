"""Canonical framing of classical protocol messages.

The frame is the exact authentication input::

    byte 0        protocol id
    byte 1        message type
    bytes 2-5     field count, uint32 little-endian
    per field     bit length, uint32 little-endian,
                  then ceil(len/8) bytes, MSB first, zero-padded

The tag travels after the frame and is never part of it.  A public nonce,
when the scheme uses one, also travels outside the frame and is not
authenticated.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, replace
from enum import IntEnum

from ..bits import BitString

__all__ = ["MsgType", "WireMessage", "FrameError", "decode_frame", "HEADER_BITS"]

HEADER_BITS = 48
_LEN_BITS = 32


class FrameError(ValueError):
    """Malformed frame bytes."""


class MsgType(IntEnum):
    S2 = 0x02
    S3 = 0x03
    S4 = 0x04
    P1 = 0x11
    P2 = 0x12
    P3 = 0x13


@dataclass(frozen=True)
class WireMessage:
    """A classical message as sent on the authenticated channel.

    Attributes
    ----------
    protocol_id : int
    msg_type : MsgType
    fields : tuple of BitString
    tag : BitString, optional
    nonce : BitString, optional
        Public nonce for nonce-prefixed schemes (unauthenticated).
    """

    protocol_id: int
    msg_type: MsgType
    fields: tuple[BitString, ...]
    tag: BitString | None = None
    nonce: BitString | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.protocol_id <= 255:
            raise ValueError("protocol id must fit in one byte")
        object.__setattr__(self, "msg_type", MsgType(self.msg_type))
        object.__setattr__(self, "fields", tuple(self.fields))

    def frame(self) -> bytes:
        parts = [bytes([self.protocol_id, int(self.msg_type)]),
                 struct.pack("<I", len(self.fields))]
        for f in self.fields:
            parts.append(struct.pack("<I", len(f)))
            parts.append(f.to_bytes())
        return b"".join(parts)

    def frame_bits(self) -> BitString:
        return BitString.from_bytes(self.frame())

    def field_offset(self, index: int) -> int:
        """Bit offset of field ``index``'s payload inside the frame."""
        pos = HEADER_BITS
        for i, f in enumerate(self.fields):
            pos += _LEN_BITS
            if i == index:
                return pos
            pos += 8 * ((len(f) + 7) // 8)
        raise IndexError(index)

    def with_fields(self, **changes) -> "WireMessage":
        return replace(self, **changes)

    def with_field(self, index: int, value: BitString) -> "WireMessage":
        fields = list(self.fields)
        fields[index] = value
        return replace(self, fields=tuple(fields))

    def describe(self) -> str:
        sizes = ",".join(str(len(f)) for f in self.fields)
        return f"{self.msg_type.name}[{sizes}]"


def decode_frame(data: bytes) -> WireMessage:
    """Parse frame bytes back into an untagged :class:`WireMessage`."""
    if len(data) < 6:
        raise FrameError("frame shorter than its header")
    protocol_id, msg_type = data[0], data[1]
    (count,) = struct.unpack_from("<I", data, 2)
    pos = 6
    fields = []
    for _ in range(count):
        if pos + 4 > len(data):
            raise FrameError("truncated field header")
        (n_bits,) = struct.unpack_from("<I", data, pos)
        pos += 4
        n_bytes = (n_bits + 7) // 8
        if pos + n_bytes > len(data):
            raise FrameError("truncated field payload")
        fields.append(BitString.from_bytes(data[pos:pos + n_bytes], n_bits))
        pos += n_bytes
    if pos != len(data):
        raise FrameError("trailing bytes after last field")
    try:
        return WireMessage(protocol_id, MsgType(msg_type), tuple(fields))
    except ValueError as exc:
        raise FrameError(str(exc)) from None
