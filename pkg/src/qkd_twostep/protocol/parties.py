"""Alice and Bob as message-passing state machines.

Each party is a generator.  It yields :class:`Send` to emit a quantum frame
or a classical message and yields :data:`RECV` to wait for the next
incoming item, which the driver passes back with ``generator.send``.  The
generator returns a :class:`PartyResult` when the party finishes or aborts.
Parties never see each other directly, so an adversary sitting between
them controls everything they receive.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from ..bits import BitString
from ..hashing import AuthScheme, TagKey, public_hash_int, two_step_tag, verify_tag
from ..quantum import EMPTY, IDEAL, ChannelParams, QuantumFrame, measure, prepare, random_bits
from .ledger import KeyLedger
from .reconcile import (
    CO_BITS,
    ConfirmSpec,
    PaSpec,
    apply_mask,
    confirm,
    decode_error_rate,
    ec_codes,
    ec_correct,
    ec_syndrome,
    encode_error_rate,
    pa_apply,
    pa_output_length,
    select_code,
    sift_mask,
)
from .variants import Variant
from .wire import MsgType, WireMessage

__all__ = [
    "RECV",
    "Send",
    "SessionParams",
    "PartyResult",
    "Alice",
    "Bob",
    "ACK_VALUE",
    "derived_pa_seed",
    "setup_bits",
]

ACK_VALUE = 0xAC
NONCE_BITS = 64
STATUS_OK = 1
STATUS_FAIL = 0


class _Recv:
    def __repr__(self) -> str:
        return "RECV"


RECV = _Recv()


@dataclass(frozen=True)
class Send:
    item: object


@dataclass(frozen=True)
class SessionParams:
    """Session-wide settings shared by both parties.

    Attributes
    ----------
    n_slots : int
        Number of quantum signals ``N``.
    channel : ChannelParams
        Loss and flip noise on the way to Bob's detector.
    error_estimate : float
        Prior error rate used to pick the EC code on the first round.
    qber_abort : float
        Bob reports ``fail`` above this error rate.
    """

    n_slots: int = 1024
    channel: ChannelParams = IDEAL
    error_estimate: float = 0.06
    qber_abort: float = 0.11

    def __post_init__(self) -> None:
        if self.n_slots < 1:
            raise ValueError("n_slots must be positive")
        if not 0.0 <= self.qber_abort <= 0.5:
            raise ValueError("qber_abort must lie in [0, 0.5]")


class Abort(Exception):
    """Raised inside a party to stop the protocol with a reason."""


@dataclass
class PartyResult:
    """Everything a party ends up holding."""

    role: str
    raw: np.ndarray | None = None
    bases: np.ndarray | None = None
    sifted: BitString | None = None
    corrected: BitString | None = None
    final_key: BitString | None = None
    error_rate: float | None = None
    abort: str | None = None
    sent: list = field(default_factory=list)
    received: list = field(default_factory=list)
    tags_checked: int = 0
    ledger_bits: int = 0
    pad: BitString | None = None


def setup_bits(variant: Variant, scheme: AuthScheme) -> int:
    """Key bits both parties draw before the first message."""
    per_tag = scheme.su2.key_bits + scheme.per_message_secret_bits
    return scheme.session_secret_bits + variant.n_tags * per_tag


def _fingerprint(scheme: AuthScheme, msg: WireMessage) -> int:
    frame = msg.frame_bits()
    if scheme.public_digest:
        prefix = msg.nonce if scheme.uses_nonce else None
        return public_hash_int(scheme.public_hash, scheme.digest_input(frame, prefix))
    return public_hash_int(scheme.public_hash, frame)


def derived_pa_seed(scheme: AuthScheme, sifting: list[WireMessage], n: int, r: int) -> BitString:
    """Toeplitz seed built from the sifting messages, without a P3 message.

    Both parties hash the public digests of the sifting frames they saw
    and expand the result with a seeded generator.  Identical digests give
    identical seeds.
    """
    if r == 0:
        return BitString.zeros(0)
    h = hashlib.sha256()
    for msg in sorted(sifting, key=lambda m: int(m.msg_type)):
        h.update(_fingerprint(scheme, msg).to_bytes(8, "big"))
    rng = np.random.default_rng(int.from_bytes(h.digest()[:8], "big"))
    return BitString(rng.integers(0, 2, size=r + n - 1, dtype=np.uint8))


class _Party:
    role = "?"

    def __init__(self, variant: Variant, scheme: AuthScheme, ledger: KeyLedger,
                 params: SessionParams, rng: np.random.Generator,
                 verify: bool = True) -> None:
        self.variant = variant
        self.scheme = scheme
        self.ledger = ledger
        self.params = params
        self.rng = rng
        self.verify = verify
        self.result = PartyResult(self.role)
        self.keys: dict[MsgType, TagKey] = {}
        self._nonce: BitString | None = None

    def run(self):
        try:
            self._setup()
            yield from self._protocol()
        except Abort as exc:
            self.result.abort = str(exc)
        self.result.ledger_bits = self.ledger.cursor
        return self.result

    def _setup(self) -> None:
        secret = None
        if self.scheme.session_secret_bits:
            secret = self.ledger.draw(self.scheme.session_secret_bits, "fixed-secret")
        for msg_type, _ in self.variant.tagged():
            self.keys[msg_type] = self.ledger.draw_tag_key(
                self.scheme, f"tag-{msg_type.name}", secret)

    # nonces ------------------------------------------------------------
    def _is_nonce_chooser(self) -> bool:
        kind = self.scheme.kind.value
        return (kind == "nonce-alice" and self.role == "alice") or \
               (kind == "nonce-bob" and self.role == "bob")

    def _outgoing_nonce(self) -> BitString | None:
        if not self.scheme.uses_nonce:
            return None
        if self._is_nonce_chooser():
            self._nonce = BitString.random(self.scheme.nonce_bits, self.rng)
        elif self._nonce is None:
            self._nonce = BitString.zeros(self.scheme.nonce_bits)
        return self._nonce

    # messaging ---------------------------------------------------------
    def _transcript(self, messages: list[WireMessage]) -> BitString:
        return BitString.concat([m.frame_bits() for m in messages])

    def _send(self, msg_type: MsgType, fields):
        msg = WireMessage(self.variant.protocol_id, msg_type, tuple(fields))
        if self.variant.tag_for(msg_type):
            nonce = self._outgoing_nonce()
            if self.variant.delayed:
                body = self._transcript(self.result.sent + [msg])
            else:
                body = msg.frame_bits()
            tag = two_step_tag(self.scheme, self.keys[msg_type], body, nonce=nonce)
            msg = msg.with_fields(tag=tag, nonce=nonce)
        self.result.sent.append(msg)
        yield Send(msg)

    def _recv(self, msg_type: MsgType) -> WireMessage:
        msg = yield RECV
        if not isinstance(msg, WireMessage) or msg.msg_type != msg_type:
            raise Abort(f"expected {msg_type.name}")
        if msg.protocol_id != self.variant.protocol_id:
            raise Abort(f"wrong protocol id in {msg_type.name}")
        self.result.received.append(msg)
        if msg.nonce is not None and self.scheme.uses_nonce:
            self._nonce = msg.nonce
        if self.variant.tag_for(msg_type) and self.verify:
            if self.variant.delayed:
                body = self._transcript(self.result.received)
            else:
                body = msg.frame_bits()
            self.result.tags_checked += 1
            if not verify_tag(self.scheme, self.keys[msg_type], body, msg.tag, nonce=msg.nonce):
                raise Abort(f"tag {msg_type.name}")
        return msg

    def _sifting_messages(self) -> list[WireMessage]:
        kinds = set(self.variant.sifting_types())
        return [m for m in self.result.sent + self.result.received if m.msg_type in kinds]

    def _derive_key(self, key: BitString, eps: float) -> BitString:
        n = len(key)
        r = pa_output_length(n, eps)
        seed = derived_pa_seed(self.scheme, self._sifting_messages(), n, r)
        return pa_apply(PaSpec(seed, r), key)


def _expect_len(msg: WireMessage, index: int, n: int) -> BitString:
    if len(msg.fields) <= index or len(msg.fields[index]) != n:
        raise Abort(f"malformed {msg.msg_type.name}")
    return msg.fields[index]


class Alice(_Party):
    """Sender of the quantum signals and of the EC/PA information."""

    role = "alice"

    def _protocol(self):
        n_slots = self.params.n_slots
        raw = random_bits(n_slots, self.rng)
        bases = random_bits(n_slots, self.rng)
        self.result.raw, self.result.bases = raw, bases
        yield Send(prepare(raw, bases))

        if self.variant.bases_sender == "A":
            yield from self._recv(MsgType.S2)
            yield from self._send(MsgType.S3, [BitString(bases)])
            s4 = yield from self._recv(MsgType.S4)
            mask = _expect_len(s4, 0, n_slots)
        else:
            s2 = yield from self._recv(MsgType.S2)
            bob_bases = _expect_len(s2, 0, n_slots).array.astype(np.int8)
            detected = _expect_len(s2, 1, n_slots).array.astype(bool)
            mask = sift_mask(bases, np.where(detected, bob_bases, EMPTY))
            yield from self._send(MsgType.S3, [mask])

        key = apply_mask(raw, mask)
        self.result.sifted = self.result.corrected = key

        code = select_code(self.params.error_estimate)
        syndrome = ec_syndrome(code, key)
        if self.variant.otp_ec:
            pad = self.ledger.draw(len(syndrome), "otp-ec")
            self.result.pad = pad
            syndrome = syndrome ^ pad
        point = int(self.rng.integers(0, 1 << CO_BITS, dtype=np.uint64))
        co = confirm(ConfirmSpec(point), key)
        yield from self._send(MsgType.P1, [
            BitString.from_int(code.index, 8), syndrome,
            BitString.from_int(point, CO_BITS), co])

        p2 = yield from self._recv(MsgType.P2)
        status = _expect_len(p2, 0, 1).to_int()
        eps = decode_error_rate(_expect_len(p2, 1, 16))
        self.result.error_rate = eps
        if status != STATUS_OK:
            raise Abort("fail received")
        if eps > self.params.qber_abort:
            raise Abort("error rate too high")

        n = len(key)
        if self.variant.has_p3:
            r = pa_output_length(n, eps)
            seed = BitString.random(r + n - 1, self.rng) if r else BitString.zeros(0)
            self.result.final_key = pa_apply(PaSpec(seed, r), key)
            yield from self._send(MsgType.P3, [BitString.from_int(r, 32), seed])
        else:
            self.result.final_key = self._derive_key(key, eps)


class Bob(_Party):
    """Receiver of the quantum signals; corrects his key towards Alice's."""

    role = "bob"

    def _protocol(self):
        n_slots = self.params.n_slots
        frame = yield RECV
        if not isinstance(frame, QuantumFrame) or len(frame) != n_slots:
            raise Abort("expected quantum frame")
        bases = random_bits(n_slots, self.rng)
        raw = measure(frame, bases, self.params.channel, self.rng)
        bases[raw == EMPTY] = EMPTY
        self.result.raw, self.result.bases = raw, bases

        if self.variant.bases_sender == "A":
            if self.variant.delayed:
                first = BitString.random(NONCE_BITS, self.rng)
            else:
                first = BitString.from_int(ACK_VALUE, 8)
            yield from self._send(MsgType.S2, [first])
            s3 = yield from self._recv(MsgType.S3)
            alice_bases = _expect_len(s3, 0, n_slots).array.astype(np.int8)
            mask = sift_mask(alice_bases, bases)
            yield from self._send(MsgType.S4, [mask])
        else:
            detected = raw != EMPTY
            yield from self._send(MsgType.S2, [
                BitString(np.where(detected, bases, 0)), BitString(detected)])
            s3 = yield from self._recv(MsgType.S3)
            mask = _expect_len(s3, 0, n_slots)

        key = apply_mask(raw, mask)
        self.result.sifted = key

        p1 = yield from self._recv(MsgType.P1)
        index = _expect_len(p1, 0, 8).to_int()
        codes = ec_codes()
        if not 1 <= index <= len(codes):
            raise Abort("unknown EC code")
        code = codes[index - 1]
        syndrome = _expect_len(p1, 1, code.syndrome_bits(len(key)))
        point = _expect_len(p1, 2, CO_BITS).to_int()
        co = _expect_len(p1, 3, CO_BITS)
        if self.variant.otp_ec:
            pad = self.ledger.draw(len(syndrome), "otp-ec")
            self.result.pad = pad
            syndrome = syndrome ^ pad

        corrected = ec_correct(code, key, syndrome)
        self.result.corrected = corrected
        eps = key.hamming(corrected) / len(key) if len(key) else 0.0
        ok = confirm(ConfirmSpec(point), corrected) == co and eps <= self.params.qber_abort
        eps_field = encode_error_rate(eps)
        self.result.error_rate = decode_error_rate(eps_field)
        status = STATUS_OK if ok else STATUS_FAIL
        yield from self._send(MsgType.P2, [BitString.from_int(status, 1), eps_field])
        if not ok:
            raise Abort("confirmation failed" if eps <= self.params.qber_abort
                        else "error rate too high")

        n = len(corrected)
        if self.variant.has_p3:
            p3 = yield from self._recv(MsgType.P3)
            r = _expect_len(p3, 0, 32).to_int()
            seed = _expect_len(p3, 1, r + n - 1 if r else 0)
            self.result.final_key = pa_apply(PaSpec(seed, r), corrected)
        else:
            self.result.final_key = self._derive_key(corrected, self.result.error_rate)
