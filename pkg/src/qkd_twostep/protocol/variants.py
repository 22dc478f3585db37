"""Protocol variants: who sends bases, when tags are checked, optional steps.

=============  ============  =========  =====  ==========
name           bases sender  tags       P3     EC syndrome
=============  ============  =========  =====  ==========
``P1``         Alice         immediate  yes    plain
``P2``         Alice         delayed    yes    plain
``P3``         Bob           immediate  yes    plain
``P3D``        Bob           delayed    yes    plain
``P1-noP3``    Alice         immediate  no     plain
``P2-noP3``    Alice         delayed    no     plain
``P3-noP3``    Bob           immediate  no     plain
``P1-otpEC``   Alice         immediate  yes    one-time pad
=============  ============  =========  =====  ==========

``P3D`` (Bob sends bases, delayed tags) is not one of the named protocols
but is the protocol behind the delayed, Bob-sends cells of the attack
matrix.

With immediate authentication every classical message carries its own tag.
With delayed authentication Bob tags his last message over the
concatenation of every frame he sent, and Alice does the same with hers.
"""

from __future__ import annotations

from dataclasses import dataclass

from .wire import MsgType

__all__ = ["Variant", "VARIANTS", "get_variant", "CLI_NAMES"]

ALICE = "A"
BOB = "B"


@dataclass(frozen=True)
class Variant:
    """Static shape of one protocol variant.

    Attributes
    ----------
    name : str
    protocol_id : int
        Written into byte 0 of every frame.
    bases_sender : {"A", "B"}
        Party that discloses its full basis string first.
    delayed : bool
        Tags checked once at the end over all frames of the sender.
    has_p3 : bool
        Privacy amplification function transmitted in its own message.
    otp_ec : bool
        Syndrome one-time-pad encrypted with ledger key.
    """

    name: str
    protocol_id: int
    bases_sender: str
    delayed: bool
    has_p3: bool = True
    otp_ec: bool = False

    def messages(self) -> tuple[tuple[MsgType, str], ...]:
        """Classical messages in protocol order with their sender."""
        if self.bases_sender == ALICE:
            seq = [(MsgType.S2, BOB), (MsgType.S3, ALICE), (MsgType.S4, BOB)]
        else:
            seq = [(MsgType.S2, BOB), (MsgType.S3, ALICE)]
        seq += [(MsgType.P1, ALICE), (MsgType.P2, BOB)]
        if self.has_p3:
            seq.append((MsgType.P3, ALICE))
        return tuple(seq)

    def sifting_types(self) -> tuple[MsgType, ...]:
        return tuple(t for t, _ in self.messages() if t.name.startswith("S"))

    def tagged(self) -> tuple[tuple[MsgType, str], ...]:
        """Tagged messages in key-draw order."""
        if not self.delayed:
            return self.messages()
        last_alice = MsgType.P3 if self.has_p3 else MsgType.P1
        return ((MsgType.P2, BOB), (last_alice, ALICE))

    @property
    def n_tags(self) -> int:
        return len(self.tagged())

    def tag_for(self, msg_type: MsgType) -> bool:
        return any(t == msg_type for t, _ in self.tagged())


VARIANTS = {
    v.name: v
    for v in (
        Variant("P1", 1, ALICE, False),
        Variant("P2", 2, ALICE, True),
        Variant("P3", 3, BOB, False),
        Variant("P3D", 4, BOB, True),
        Variant("P1-noP3", 5, ALICE, False, has_p3=False),
        Variant("P2-noP3", 6, ALICE, True, has_p3=False),
        Variant("P3-noP3", 7, BOB, False, has_p3=False),
        Variant("P1-otpEC", 8, ALICE, False, otp_ec=True),
    )
}

# Command-line spellings.
CLI_NAMES = {
    "1": "P1", "2": "P2", "3": "P3", "3D": "P3D",
    "1-noP3": "P1-noP3", "2-noP3": "P2-noP3", "3-noP3": "P3-noP3",
    "1-otpEC": "P1-otpEC",
}


def get_variant(name: "str | Variant") -> Variant:
    if isinstance(name, Variant):
        return name
    key = CLI_NAMES.get(name, name)
    try:
        return VARIANTS[key]
    except KeyError:
        raise ValueError(f"unknown protocol variant {name!r}") from None
