"""Man-in-the-middle strategies against the protocol variants.

Every strategy receives an :class:`~qkd_twostep.protocol.session.AttackContext`
with both endpoints and plays Eve: it takes what a party emits, decides
what the other party receives and returns an
:class:`~qkd_twostep.protocol.session.EveReport`.

Forged classical messages keep the intercepted tag.  When the scheme's
digest is public, Eve searches for a modified message with the same
digest (:mod:`.forge`); otherwise she has no search to run and the
unmodified tag is simply presented, which the receiver rejects unless the
tag happens to fit.

Attack matrix
-------------
=====================  =========================  ===========================
                       immediate tags             delayed tags
=====================  =========================  ===========================
A sends, memory        ``p1-interleave-qm``       ``p2-onesided-qm``
A sends, no memory     ``a-intercept-resend``     ``a-delayed-intercept``
B sends, memory        ``b-memory``               ``b-delayed-memory``
B sends, no memory     ``p3-intercept-resend``    ``b-delayed-intercept``
=====================  =========================  ===========================

Further strategies: ``p2-bidirectional-qm`` (both directions at once
against delayed tags), ``otpec-qm`` and ``otpec-guess`` (encrypted
syndrome), ``straightforward-mitm`` (Eve runs two honest sessions with
guessed keys) and ``tamper`` (one flipped bit).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..bits import BitString
from ..hashing import public_hash_int
from ..quantum import EMPTY, intercept_resend, memory_measure, memory_store, prepare, random_bits
from ..protocol.ledger import KeyLedger
from ..protocol.parties import (
    Alice,
    Bob,
    derived_pa_seed,
)
from ..protocol.reconcile import (
    ConfirmSpec,
    PaSpec,
    apply_mask,
    confirm,
    decode_error_rate,
    ec_codes,
    ec_syndrome,
    pa_apply,
    pa_output_length,
    select_code,
    sift_mask,
)
from ..protocol.session import (
    ONE_SIDED,
    SEPARATE,
    THREE_WAY,
    AttackContext,
    Endpoint,
    EveReport,
    TraceEvent,
    relay,
    required_pool_bits,
    run_protocol,
)
from ..protocol.variants import get_variant
from ..protocol.wire import MsgType, WireMessage
from .forge import MutationSpace, find_colliding_message
from .subsequence import craft_paced_mask
from .toolkit import (
    key_bit_units,
    pa_null_units,
    pa_preimage_seed,
    recover_key,
    spread_positions,
    swap_units,
)

__all__ = [
    "AttackOptions",
    "Strategy",
    "STRATEGIES",
    "MATRIX",
    "get_strategy",
    "matrix_cell",
    "execute_attack",
    "Halt",
]


class Halt(Exception):
    """A party stopped listening or has nothing more to send."""


@dataclass(frozen=True)
class AttackOptions:
    """Knobs shared by the strategies.

    Attributes
    ----------
    w_max : int
        Largest number of units flipped in one collision search.
    n_units : int
        Units offered to each collision search.
    tail : float
        Schedule parameter of the paced mask construction.
    distort : float
        Fraction of extra key bits Eve flips in her syndrome message, which
        raises the error rate Bob reports.
    tamper_index : int, optional
        Message hit by ``tamper``; random when omitted.
    point_retries : int
        Fresh confirmation points tried after a failed syndrome forgery.
    """

    w_max: int = 3
    n_units: int = 64
    tail: float = 1.5
    distort: float = 0.0
    tamper_index: int | None = None
    point_retries: int = 3


def _kind(item) -> str:
    return item.describe() if isinstance(item, WireMessage) else f"Q[{len(item)}]"


def _frames(msgs) -> BitString:
    return BitString.concat([m.frame_bits() for m in msgs])


def _field_units(msg: WireMessage, index: int, positions) -> list[tuple[int, ...]]:
    off = msg.field_offset(index)
    return [tuple(off + int(p) for p in np.atleast_1d(pos)) for pos in positions]


class Eve:
    """Channel bookkeeping and forging helpers for one attack run."""

    def __init__(self, ctx: AttackContext, options: AttackOptions) -> None:
        self.ctx = ctx
        self.a = ctx.alice
        self.b = ctx.bob
        self.variant = ctx.variant
        self.scheme = ctx.scheme
        self.params = ctx.params
        self.rng = ctx.rng
        self.opt = options
        self.report = EveReport()
        # Classical messages exchanged with each party, in order.
        self.seen = {"alice": [], "bob": []}

    # channel -----------------------------------------------------------
    def take(self, ep: Endpoint):
        if not ep.outbox:
            raise Halt(ep.name)
        item = ep.take()
        if isinstance(item, WireMessage):
            self.seen[ep.name].append(item)
        return item

    def give(self, ep: Endpoint, item, *, forged: bool = False, weight=None,
             tested=None, note: str = "", direction: str | None = None) -> None:
        direction = direction or ("E->A" if ep is self.a else "E->B")
        ok = ep.give(item)
        self.ctx.events.append(TraceEvent(direction, _kind(item), forged, weight, tested, note))
        if not ok:
            raise Halt(ep.name)
        if isinstance(item, WireMessage):
            self.seen[ep.name].append(item)

    def forward(self, src: Endpoint, dst: Endpoint):
        item = self.take(src)
        self.give(dst, item, direction=f"{src.name[0].upper()}->{dst.name[0].upper()}")
        return item

    # forging -----------------------------------------------------------
    def forge(self, base: WireMessage, units, target: WireMessage, *,
              tag_from: WireMessage | None = None, mine_before=(), mine_after=(),
              theirs_before=(), theirs_after=()):
        """Make ``base`` (plus units) pass the check meant for ``target``.

        ``theirs_*`` are the frames around ``target`` in the transcript the
        tag covers, ``mine_*`` the frames around the forgery in the
        receiver's transcript.  ``tag_from`` is the message that carries
        the tag (``target`` itself with immediate tags).
        """
        tag_msg = tag_from or target
        nonce = tag_msg.nonce if self.scheme.uses_nonce else None
        record = {"msg": target.msg_type.name, "found": False, "weight": None,
                  "candidates": 0}
        out = base
        if self.scheme.public_digest:
            prefix = self.scheme.digest_input(BitString.zeros(0), nonce)
            body = _frames(list(theirs_before) + [target] + list(theirs_after))
            digest = public_hash_int(self.scheme.public_hash, prefix + body)
            space = MutationSpace(base, units=tuple(units), w_max=self.opt.w_max,
                                  before=prefix + _frames(mine_before),
                                  after=_frames(mine_after))
            res = find_colliding_message(space, digest, self.scheme.public_hash)
            record.update(found=res.found, weight=res.weight_used,
                          candidates=res.candidates_tested)
            if res.found:
                out = res.message
                record["units"] = list(res.units_used)
        else:
            record["note"] = "digest not public"
        self.report.forges.append(record)
        if target.tag is not None:
            out = out.with_fields(tag=target.tag, nonce=target.nonce)
        return out, record

    def give_forged(self, ep, msg, record) -> None:
        self.give(ep, msg, forged=True, weight=record["weight"],
                  tested=record["candidates"], note="collision" if record["found"] else "")

    # key helpers -------------------------------------------------------
    def derived_key(self, role: str, key: BitString, eps: float) -> BitString:
        kinds = set(self.variant.sifting_types())
        msgs = [m for m in self.seen[role] if m.msg_type in kinds]
        n = len(key)
        r = pa_output_length(n, eps)
        return pa_apply(PaSpec(derived_pa_seed(self.scheme, msgs, n, r), r), key)

    def distorted(self, key: BitString, avoid) -> BitString:
        if self.opt.distort <= 0 or len(key) == 0:
            return key
        count = int(round(self.opt.distort * len(key)))
        bad = {p // 16 for p in avoid}
        blocks = [b for b in range(len(key) // 16) if b not in bad]
        picks = spread_positions(len(blocks), count)
        return key.flip([blocks[b] * 16 + 1 for b in picks])

    def syndrome_message(self, p1: WireMessage, key: BitString, pad: BitString | None = None,
                         point: int | None = None):
        """Eve's P1 for ``key`` with Alice's code and Alice's (or a given) point."""
        code = ec_codes()[p1.fields[0].to_int() - 1]
        if point is None:
            point = p1.fields[2].to_int()
        syn = ec_syndrome(code, key)
        if pad is not None:
            syn = syn ^ pad
        co = confirm(ConfirmSpec(point), key)
        return p1.with_fields(fields=(p1.fields[0], syn, BitString.from_int(point, 32), co),
                              tag=None, nonce=None)

    def forge_syndrome(self, p1: WireMessage, key: BitString, avoid, pad=None,
                       mine_before=(), theirs_before=()):
        """Syndrome message for ``key`` (up to a few flipped bits) passing ``p1``'s check.

        The confirmation point is Eve's choice, so a failed search is
        retried with a fresh point.  Returns the message, the search record
        and the key the message describes.
        """
        point = None
        for attempt in range(self.opt.point_retries + 1):
            base = self.syndrome_message(p1, key, pad, point)
            units, positions = self.syndrome_units(base, key, avoid)
            msg, rec = self.forge(base, units, p1, mine_before=mine_before,
                                  theirs_before=theirs_before)
            rec["attempts"] = attempt + 1
            if rec["found"] or not self.scheme.public_digest:
                break
            self.report.forges.pop()
            point = int(self.rng.integers(0, 1 << 32, dtype=np.uint64))
        else:
            self.report.forges.append(rec)
        if rec["found"]:
            key = key.flip([positions[u] for u in rec.get("units", [])])
        return msg, rec, key

    def syndrome_units(self, msg: WireMessage, key: BitString, avoid) -> list:
        code = ec_codes()[msg.fields[0].to_int() - 1]
        units = key_bit_units(code, key, msg.fields[2].to_int(), self.opt.n_units, avoid)
        syn_off, co_off = msg.field_offset(1), msg.field_offset(3)
        frame_units = [tuple(syn_off + u.syndrome_positions) + tuple(co_off + u.co_positions)
                       for u in units]
        return frame_units, [u.key_position for u in units]


# shared phases ------------------------------------------------------------
def _mask_flips(forged: WireMessage, base: WireMessage) -> list[int]:
    return np.flatnonzero((forged.fields[0] ^ base.fields[0]).array).tolist()


def _sifted_index(mask: BitString, positions) -> list[int]:
    """Index in the sifted key of each raw position that the mask keeps."""
    arr = mask.array
    rank = np.cumsum(arr) - 1
    return [int(rank[p]) for p in positions if arr[p]]


def _pa_forge(eve: Eve, p3: WireMessage, key_b: BitString, k_final: BitString,
              mine_before, theirs_before):
    """P3 for Bob under which ``key_b`` hashes to ``k_final`` if possible.

    Seed changes from the null space keep Bob's output equal to
    ``k_final``.  When none of them collides, any nearby seed is accepted
    and Bob ends up with a different key that Eve can still compute.

    Returns the forged message, its record and Bob's resulting key.
    """
    r = len(k_final)
    seed = pa_preimage_seed(key_b, k_final) if r else BitString.zeros(0)
    base = p3.with_fields(fields=(p3.fields[0], seed), tag=None, nonce=None)
    units = _field_units(base, 1, pa_null_units(key_b, r, eve.opt.n_units))
    msg, rec = eve.forge(base, units, p3, mine_before=mine_before, theirs_before=theirs_before)
    if rec["found"] or not eve.scheme.public_digest or r == 0:
        return msg, rec, k_final
    eve.report.forges.pop()
    units = _field_units(base, 1, spread_positions(len(seed), eve.opt.n_units))
    msg, rec = eve.forge(base, units, p3, mine_before=mine_before, theirs_before=theirs_before)
    rec["fallback"] = True
    return msg, rec, pa_apply(PaSpec(msg.fields[1], r), key_b)


def _finish_case3(eve: Eve, est_a: BitString, unc_a, est_b: BitString, unc_b) -> None:
    """EC and PA phase with immediate tags and two separate sifted keys."""
    p1 = eve.take(eve.a)
    code = ec_codes()[p1.fields[0].to_int() - 1]
    k_a = recover_key(code, est_a, unc_a, p1.fields[1], p1.fields[2].to_int(), p1.fields[3])
    eve.report.extras["alice_key_recovered"] = k_a is not None
    if k_a is None:
        k_a = est_a
    key_b = eve.distorted(est_b, unc_b)
    p1e, rec, key_b = eve.forge_syndrome(p1, key_b, unc_b)
    eve.give_forged(eve.b, p1e, rec)
    p2 = eve.forward(eve.b, eve.a)
    eps = decode_error_rate(p2.fields[1])
    if eve.variant.has_p3:
        p3 = eve.take(eve.a)
        r = p3.fields[0].to_int()
        k_final = pa_apply(PaSpec(p3.fields[1], r), k_a)
        p3e, rec, eve.report.key_b = _pa_forge(eve, p3, key_b, k_final, (), ())
        eve.report.key_a = k_final
        eve.give_forged(eve.b, p3e, rec)
    else:
        eve.report.key_a = eve.derived_key("alice", k_a, eps)
        eve.report.key_b = eve.derived_key("bob", key_b, eps)


def _finish_delayed(eve: Eve, k_a: BitString, key_b: BitString,
                    mine_sifting, theirs_sifting) -> None:
    """EC and PA phase with delayed tags.

    ``k_a`` is Eve's belief about Alice's sifted key and ``key_b`` Bob's
    sifted key.  Alice's transcript (``theirs``) is matched by the one Bob
    receives (``mine``) in the last Alice message.
    """
    p1 = eve.take(eve.a)
    key_b = eve.distorted(key_b, ())
    p1e = eve.syndrome_message(p1, key_b)
    if eve.variant.has_p3:
        eve.give(eve.b, p1e, forged=True)
        p2 = eve.forward(eve.b, eve.a)
        p3 = eve.take(eve.a)
        r = p3.fields[0].to_int()
        k_final = pa_apply(PaSpec(p3.fields[1], r), k_a)
        p3e, rec, eve.report.key_b = _pa_forge(
            eve, p3, key_b, k_final, list(mine_sifting) + [p1e], list(theirs_sifting) + [p1])
        eve.report.key_a = k_final
        eve.give_forged(eve.b, p3e, rec)
        del p2
    else:
        p1f, rec, key_b = eve.forge_syndrome(p1, key_b, (), mine_before=mine_sifting,
                                             theirs_before=theirs_sifting)
        eve.give_forged(eve.b, p1f, rec)
        p2 = eve.forward(eve.b, eve.a)
        eps = decode_error_rate(p2.fields[1])
        eve.report.key_a = eve.derived_key("alice", k_a, eps)
        eve.report.key_b = eve.derived_key("bob", key_b, eps)


def _forward_rest(eve: Eve, k_a: BitString, pad_out: bool = False) -> None:
    """Case 1: relay EC and PA unchanged; Eve already holds Alice's key."""
    p1 = eve.forward(eve.a, eve.b)
    if eve.variant.otp_ec:
        code = ec_codes()[p1.fields[0].to_int() - 1]
        eve.report.extras["pad"] = p1.fields[1] ^ ec_syndrome(code, k_a)
    p2 = eve.forward(eve.b, eve.a)
    eps = decode_error_rate(p2.fields[1])
    if eve.variant.has_p3:
        p3 = eve.forward(eve.a, eve.b)
        key = pa_apply(PaSpec(p3.fields[1], p3.fields[0].to_int()), k_a)
    else:
        key = eve.derived_key("alice", k_a, eps)
    eve.report.key_a = eve.report.key_b = key


def _bob_view(bob_bases: np.ndarray, detected: np.ndarray) -> np.ndarray:
    return np.where(detected, bob_bases, EMPTY).astype(np.int8)


# strategies ---------------------------------------------------------------
class Strategy:
    """Base class.

    Attributes
    ----------
    name : str
    variants : tuple of str
        Variants the strategy is written for.
    quantum_memory : bool
    expected : dict
        ``variant -> (correlation case, final relation)`` when every forge
        succeeds.
    """

    name = "?"
    variants: tuple = ()
    quantum_memory = False
    expected: dict = {}

    def __init__(self, options: AttackOptions | None = None) -> None:
        self.options = options or AttackOptions()

    def execute(self, ctx: AttackContext) -> EveReport:
        if ctx.variant.name not in self.variants:
            raise ValueError(f"{self.name} does not apply to {ctx.variant.name}")
        eve = Eve(ctx, self.options)
        try:
            self.play(eve)
        except Halt as stop:
            eve.report.extras["halted"] = str(stop)
        return eve.report

    def play(self, eve: Eve) -> None:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name!r})"


class P1InterleaveQM(Strategy):
    """Alice sends bases, immediate tags, quantum memory (case 1).

    Eve keeps Alice's photons, sends Bob her own, and learns Bob's sifted
    key through a forged basis message.  Alice's mask is then crafted so
    that Alice's sifted key is Bob's, up to a few errors per EC block.
    """

    name = "p1-interleave-qm"
    variants = ("P1", "P1-noP3", "P1-otpEC")
    quantum_memory = True
    expected = {"P1": (1, THREE_WAY), "P1-noP3": (1, THREE_WAY), "P1-otpEC": (1, THREE_WAY)}

    def play(self, eve: Eve) -> None:
        n = eve.params.n_slots
        mem = memory_store(eve.take(eve.a))
        raw_e, bases_e = random_bits(n, eve.rng), random_bits(n, eve.rng)
        eve.give(eve.b, prepare(raw_e, bases_e))
        eve.forward(eve.b, eve.a)                      # S2 acknowledgement
        s3 = eve.take(eve.a)
        raw_a = memory_measure(mem, s3.fields[0].array.astype(np.int8), eve.rng)

        base = s3.with_fields(fields=(BitString(bases_e),), tag=None, nonce=None)
        units = _field_units(base, 0, spread_positions(n, eve.opt.n_units))
        s3e, rec = eve.forge(base, units, s3)
        eve.give_forged(eve.b, s3e, rec)
        flipped = _mask_flips(s3e, base)

        s4 = eve.take(eve.b)
        mask_b = s4.fields[0]
        k_eb = apply_mask(raw_e, mask_b)
        unc_b = set(_sifted_index(mask_b, flipped))
        code = select_code(eve.params.error_estimate)
        n_blocks = code.n_blocks(len(k_eb))
        budget = [code.radius] * n_blocks
        for u in unc_b:
            budget[u // code.block_len] -= 1
        crafted = craft_paced_mask(raw_a, k_eb, budget, code.block_len, eve.opt.tail)
        eve.report.extras["craft_mismatches"] = crafted.mismatches
        eve.report.extras["craft_ok"] = crafted.ok

        base = s4.with_fields(fields=(crafted.mask,), tag=None, nonce=None)
        pairs = swap_units(crafted.mask, lambda j: raw_a[j] == raw_a[j + 1], eve.opt.n_units)
        s4e, rec = eve.forge(base, _field_units(base, 0, pairs), s4)
        eve.give_forged(eve.a, s4e, rec)
        k_a = apply_mask(raw_a, s4e.fields[0])
        eve.report.sifted_a, eve.report.sifted_b = k_a, k_eb
        eve.report.uncertain_b = unc_b
        _forward_rest(eve, k_a)


class OtpEcQM(P1InterleaveQM):
    """Interleaving attack on the encrypted-syndrome variant; recovers the pad."""

    name = "otpec-qm"
    variants = ("P1-otpEC",)
    expected = {"P1-otpEC": (1, THREE_WAY)}


class P2OneSidedQM(Strategy):
    """Alice sends bases, delayed tags, quantum memory (case 2).

    Eve measures Alice's photons in Alice's announced bases, gives Bob her
    own bases and makes the final Alice message collide.
    """

    name = "p2-onesided-qm"
    variants = ("P2", "P2-noP3")
    quantum_memory = True
    expected = {"P2": (2, THREE_WAY), "P2-noP3": (2, SEPARATE)}

    def play(self, eve: Eve) -> None:
        n = eve.params.n_slots
        mem = memory_store(eve.take(eve.a))
        raw_e, bases_e = random_bits(n, eve.rng), random_bits(n, eve.rng)
        eve.give(eve.b, prepare(raw_e, bases_e))
        eve.forward(eve.b, eve.a)                      # S2 nonce
        s3 = eve.take(eve.a)
        raw_a = memory_measure(mem, s3.fields[0].array.astype(np.int8), eve.rng)
        s3e = s3.with_fields(fields=(BitString(bases_e),))
        eve.give(eve.b, s3e, forged=True)
        s4 = eve.forward(eve.b, eve.a)
        k_a = apply_mask(raw_a, s4.fields[0])
        k_b = apply_mask(raw_e, s4.fields[0])
        eve.report.sifted_a, eve.report.sifted_b = k_a, k_b
        _finish_delayed(eve, k_a, k_b, [s3e], [s3])


class P2BidirectionalQM(Strategy):
    """Delayed tags attacked in both directions in one session.

    Eve answers Alice with her own nonce, relays Alice's photons to Bob
    after measuring them in Alice's bases, and collides both transcripts:
    Bob's through a shuffled sifting mask, Alice's through the PA seed.
    """

    name = "p2-bidirectional-qm"
    variants = ("P2",)
    quantum_memory = True
    expected = {"P2": (1, THREE_WAY)}

    def play(self, eve: Eve) -> None:
        nonce_bits = 64
        mem = memory_store(eve.take(eve.a))
        s2e = WireMessage(eve.variant.protocol_id, MsgType.S2,
                          (BitString.random(nonce_bits, eve.rng),))
        eve.give(eve.a, s2e, forged=True)
        s3 = eve.take(eve.a)
        bases_a = s3.fields[0].array.astype(np.int8)
        raw_a = memory_measure(mem, bases_a, eve.rng)
        eve.give(eve.b, prepare(raw_a, bases_a))
        s2 = eve.take(eve.b)
        eve.give(eve.b, s3, direction="A->B")
        s4 = eve.take(eve.b)
        k = apply_mask(raw_a, s4.fields[0])

        code = select_code(eve.params.error_estimate)
        point = int(eve.rng.integers(0, 1 << 32, dtype=np.uint64))
        p1e = WireMessage(eve.variant.protocol_id, MsgType.P1, (
            BitString.from_int(code.index, 8), ec_syndrome(code, k),
            BitString.from_int(point, 32), confirm(ConfirmSpec(point), k)))
        eve.give(eve.b, p1e, forged=True)
        p2 = eve.take(eve.b)

        pairs = swap_units(s4.fields[0], lambda j: raw_a[j] == raw_a[j + 1], eve.opt.n_units)
        s4e, rec = eve.forge(s4, _field_units(s4, 0, pairs), s4, tag_from=p2,
                             mine_before=[s2e], mine_after=[p2],
                             theirs_before=[s2], theirs_after=[p2])
        eve.give_forged(eve.a, s4e, rec)
        k_a = apply_mask(raw_a, s4e.fields[0])
        eve.report.sifted_a, eve.report.sifted_b = k_a, k
        p1 = eve.take(eve.a)
        eve.give(eve.a, p2, direction="B->A")
        p3 = eve.take(eve.a)
        r = p3.fields[0].to_int()
        k_final = pa_apply(PaSpec(p3.fields[1], r), k_a)
        p3e, rec, eve.report.key_b = _pa_forge(eve, p3, k, k_final, [s3, p1e], [s3, p1])
        eve.report.key_a = k_final
        eve.give_forged(eve.b, p3e, rec)


class AInterceptResend(Strategy):
    """Alice sends bases, immediate tags, no memory (case 3)."""

    name = "a-intercept-resend"
    variants = ("P1",)
    expected = {"P1": (3, THREE_WAY)}

    def sift(self, eve: Eve):
        n = eve.params.n_slots
        bases_e = random_bits(n, eve.rng)
        raw_e, resent = intercept_resend(eve.take(eve.a), bases_e, eve.rng)
        eve.give(eve.b, resent)
        eve.forward(eve.b, eve.a)
        s3 = eve.take(eve.a)
        bases_a = s3.fields[0].array.astype(np.int8)
        base = s3.with_fields(fields=(BitString(bases_e),), tag=None, nonce=None)
        units = _field_units(base, 0, spread_positions(n, eve.opt.n_units))
        s3e, rec = eve.forge(base, units, s3)
        eve.give_forged(eve.b, s3e, rec)
        flipped = _mask_flips(s3e, base)
        s4 = eve.take(eve.b)
        mask_b = s4.fields[0]
        k_eb = apply_mask(raw_e, mask_b)
        unc_b = set(_sifted_index(mask_b, flipped))
        return raw_e, bases_e, bases_a, s4, k_eb, unc_b

    def send_mask(self, eve: Eve, s4: WireMessage, mask: BitString, raw_e, bases_e, bases_a):
        pairs = swap_units(mask, None, eve.opt.n_units)
        base = s4.with_fields(fields=(mask,), tag=None, nonce=None)
        s4e, rec = eve.forge(base, _field_units(base, 0, pairs), s4)
        eve.give_forged(eve.a, s4e, rec)
        final = s4e.fields[0]
        k_ea = apply_mask(raw_e, final)
        unknown = np.flatnonzero(bases_a != bases_e)
        return k_ea, set(_sifted_index(final, unknown))

    def play(self, eve: Eve) -> None:
        raw_e, bases_e, bases_a, s4, k_eb, unc_b = self.sift(eve)
        mask = sift_mask(bases_a, bases_e)
        k_ea, unc_a = self.send_mask(eve, s4, mask, raw_e, bases_e, bases_a)
        eve.report.sifted_a, eve.report.sifted_b = k_ea, k_eb
        eve.report.uncertain_a, eve.report.uncertain_b = unc_a, unc_b
        _finish_case3(eve, k_ea, unc_a, k_eb, unc_b)


class OtpEcGuess(AInterceptResend):
    """Encrypted syndrome without memory: Eve guesses the pad.

    The mask sent to Alice is padded to the length of Bob's sifted key so
    both syndromes have the same length.  Eve's unknown bits of Alice's
    key are guessed at random and the pad derived from the guess; the
    attack succeeds when the guess is right.
    """

    name = "otpec-guess"
    variants = ("P1-otpEC",)
    expected = {"P1-otpEC": (3, THREE_WAY)}

    def play(self, eve: Eve) -> None:
        raw_e, bases_e, bases_a, s4, k_eb, unc_b = self.sift(eve)
        n_b = len(k_eb)
        known = np.flatnonzero(bases_a == bases_e)
        unknown = np.flatnonzero(bases_a != bases_e)
        chosen = np.concatenate([known[:n_b], unknown[:max(0, n_b - known.size)]])
        mask_arr = np.zeros(eve.params.n_slots, dtype=np.uint8)
        mask_arr[chosen] = 1
        k_ea, unc_a = self.send_mask(eve, s4, BitString(mask_arr), raw_e, bases_e, bases_a)
        eve.report.sifted_a, eve.report.sifted_b = k_ea, k_eb
        eve.report.uncertain_a, eve.report.uncertain_b = unc_a, unc_b

        p1 = eve.take(eve.a)
        code = ec_codes()[p1.fields[0].to_int() - 1]
        guess = k_ea.flip([u for u in sorted(unc_a) if eve.rng.integers(0, 2)])
        pad = p1.fields[1] ^ ec_syndrome(code, guess)
        eve.report.extras.update(w=len(unc_a), pad=pad, guess=guess)
        key_b = k_eb
        p1e, rec, key_b = eve.forge_syndrome(p1, key_b, unc_b, pad=pad)
        eve.give_forged(eve.b, p1e, rec)
        eve.forward(eve.b, eve.a)
        p3 = eve.take(eve.a)
        k_final = pa_apply(PaSpec(p3.fields[1], p3.fields[0].to_int()), guess)
        p3e, rec, eve.report.key_b = _pa_forge(eve, p3, key_b, k_final, (), ())
        eve.report.key_a = k_final
        eve.give_forged(eve.b, p3e, rec)


class ADelayedIntercept(Strategy):
    """Alice sends bases, delayed tags, no memory (case 4)."""

    name = "a-delayed-intercept"
    variants = ("P2",)
    expected = {"P2": (4, ONE_SIDED)}

    def play(self, eve: Eve) -> None:
        n = eve.params.n_slots
        bases_e = random_bits(n, eve.rng)
        raw_e, resent = intercept_resend(eve.take(eve.a), bases_e, eve.rng)
        eve.give(eve.b, resent)
        eve.forward(eve.b, eve.a)
        s3 = eve.take(eve.a)
        bases_a = s3.fields[0].array.astype(np.int8)
        s3e = s3.with_fields(fields=(BitString(bases_e),))
        eve.give(eve.b, s3e, forged=True)
        s4 = eve.forward(eve.b, eve.a)
        mask = s4.fields[0]
        k = apply_mask(raw_e, mask)
        eve.report.sifted_a, eve.report.sifted_b = k, k
        eve.report.uncertain_a = set(_sifted_index(mask, np.flatnonzero(bases_a != bases_e)))
        _finish_delayed(eve, k, k, [s3e], [s3])


class BMemory(Strategy):
    """Bob sends bases, immediate tags, quantum memory (case 3)."""

    name = "b-memory"
    variants = ("P3",)
    quantum_memory = True
    expected = {"P3": (3, THREE_WAY)}

    def play(self, eve: Eve) -> None:
        n = eve.params.n_slots
        mem = memory_store(eve.take(eve.a))
        raw_e, bases_e = random_bits(n, eve.rng), random_bits(n, eve.rng)
        eve.give(eve.b, prepare(raw_e, bases_e))
        s2 = eve.forward(eve.b, eve.a)
        detected = s2.fields[1].array.astype(bool)
        bases_b = _bob_view(s2.fields[0].array.astype(np.int8), detected)
        s3 = eve.take(eve.a)
        raw_a = memory_measure(mem, np.where(detected, bases_b, 0), eve.rng)
        k_a = apply_mask(raw_a, s3.fields[0])
        _send_bob_mask(eve, s3, raw_e, bases_e, bases_b, detected)
        eve.report.sifted_a = k_a
        _finish_case3(eve, k_a, set(), eve.report.sifted_b, eve.report.uncertain_b)


def _send_bob_mask(eve: Eve, s3: WireMessage, raw_e, bases_e, bases_b, detected) -> None:
    """Forge Alice's mask so that Bob keeps the slots he shares with Eve."""
    mask = sift_mask(bases_e, bases_b)
    base = s3.with_fields(fields=(mask,), tag=None, nonce=None)
    pairs = swap_units(mask, None, eve.opt.n_units)
    s3e, rec = eve.forge(base, _field_units(base, 0, pairs), s3)
    eve.give_forged(eve.b, s3e, rec)
    final = s3e.fields[0]
    # Bob's raw bit is Eve's where the bases agree and 0 where he lost the slot.
    estimate = np.where(detected, raw_e, 0)
    unknown = np.flatnonzero(detected & (bases_b != bases_e))
    eve.report.sifted_b = apply_mask(estimate, final)
    eve.report.uncertain_b = set(_sifted_index(final, unknown))


class P3InterceptResend(Strategy):
    """Bob sends bases, immediate tags, no memory (case 3).

    Eve measures every photon in random bases and resends.  She tells
    Alice she measured in (almost) her own bases and tells Bob that Alice
    kept the slots where Bob and Eve agree.
    """

    name = "p3-intercept-resend"
    variants = ("P3", "P3-noP3")
    expected = {"P3": (3, THREE_WAY), "P3-noP3": (3, SEPARATE)}

    def play(self, eve: Eve) -> None:
        n = eve.params.n_slots
        bases_e = random_bits(n, eve.rng)
        raw_e, resent = intercept_resend(eve.take(eve.a), bases_e, eve.rng)
        eve.give(eve.b, resent)
        s2 = eve.take(eve.b)
        detected = s2.fields[1].array.astype(bool)
        bases_b = _bob_view(s2.fields[0].array.astype(np.int8), detected)
        seen = raw_e != EMPTY
        base = s2.with_fields(fields=(BitString(np.where(seen, bases_e, 0)), BitString(seen)),
                              tag=None, nonce=None)
        units = _field_units(base, 0, spread_positions(n, eve.opt.n_units))
        s2e, rec = eve.forge(base, units, s2)
        eve.give_forged(eve.a, s2e, rec)
        claimed = s2e.fields[0].array.astype(np.int8)
        s3 = eve.take(eve.a)
        mask_a = s3.fields[0]
        k_ea = apply_mask(np.where(seen, raw_e, 0), mask_a)
        unc_a = set(_sifted_index(mask_a, np.flatnonzero(claimed != bases_e)))
        _send_bob_mask(eve, s3, raw_e, bases_e, bases_b, detected)
        eve.report.sifted_a, eve.report.uncertain_a = k_ea, unc_a
        _finish_case3(eve, k_ea, unc_a, eve.report.sifted_b, eve.report.uncertain_b)


class BDelayedMemory(Strategy):
    """Bob sends bases, delayed tags, quantum memory (case 2)."""

    name = "b-delayed-memory"
    variants = ("P3D",)
    quantum_memory = True
    expected = {"P3D": (2, THREE_WAY)}

    def play(self, eve: Eve) -> None:
        n = eve.params.n_slots
        mem = memory_store(eve.take(eve.a))
        raw_e, bases_e = random_bits(n, eve.rng), random_bits(n, eve.rng)
        eve.give(eve.b, prepare(raw_e, bases_e))
        s2 = eve.forward(eve.b, eve.a)
        detected = s2.fields[1].array.astype(bool)
        bases_b = _bob_view(s2.fields[0].array.astype(np.int8), detected)
        s3 = eve.take(eve.a)
        raw_a = memory_measure(mem, np.where(detected, bases_b, 0), eve.rng)
        k_a = apply_mask(raw_a, s3.fields[0])
        s3e = s3.with_fields(fields=(sift_mask(bases_e, bases_b),))
        eve.give(eve.b, s3e, forged=True)
        k_b = apply_mask(np.where(detected, raw_e, 0), s3e.fields[0])
        eve.report.sifted_a, eve.report.sifted_b = k_a, k_b
        _finish_delayed(eve, k_a, k_b, [s3e], [s3])


class BDelayedIntercept(Strategy):
    """Bob sends bases, delayed tags, no memory (case 4)."""

    name = "b-delayed-intercept"
    variants = ("P3D",)
    expected = {"P3D": (4, ONE_SIDED)}

    def play(self, eve: Eve) -> None:
        n = eve.params.n_slots
        bases_e = random_bits(n, eve.rng)
        raw_e, resent = intercept_resend(eve.take(eve.a), bases_e, eve.rng)
        eve.give(eve.b, resent)
        s2 = eve.forward(eve.b, eve.a)
        detected = s2.fields[1].array.astype(bool)
        bases_b = _bob_view(s2.fields[0].array.astype(np.int8), detected)
        s3 = eve.take(eve.a)
        mask_a = s3.fields[0]
        known = np.where(raw_e == EMPTY, 0, raw_e)
        k_ea = apply_mask(known, mask_a)
        unc_a = set(_sifted_index(mask_a, np.flatnonzero(bases_b != bases_e)))
        s3e = s3.with_fields(fields=(sift_mask(bases_e, bases_b),))
        eve.give(eve.b, s3e, forged=True)
        k_b = apply_mask(np.where(detected, raw_e, 0), s3e.fields[0])
        eve.report.sifted_a, eve.report.sifted_b = k_ea, k_b
        eve.report.uncertain_a = unc_a
        _finish_delayed(eve, k_ea, k_b, [s3e], [s3])


class StraightforwardMITM(Strategy):
    """Eve runs an honest-looking session with each party on guessed keys."""

    name = "straightforward-mitm"
    variants = ("P1", "P2", "P3", "P3D", "P1-noP3", "P2-noP3", "P3-noP3", "P1-otpEC")
    expected = {}

    def play(self, eve: Eve) -> None:
        v, sch, prm = eve.variant, eve.scheme, eve.params
        pool_rng, a_rng, b_rng = eve.rng.spawn(3)
        bits = required_pool_bits(v, sch, prm)
        fake_bob = Endpoint(Bob(v, sch, KeyLedger(BitString.random(bits, pool_rng)), prm,
                                b_rng, verify=False).run(), "eve-as-bob")
        fake_alice = Endpoint(Alice(v, sch, KeyLedger(BitString.random(bits, pool_rng)), prm,
                                    a_rng, verify=False).run(), "eve-as-alice")
        relay(eve.a, fake_bob, eve.ctx.events)
        relay(fake_alice, eve.b, eve.ctx.events)
        for ep in (fake_bob, fake_alice):
            ep.close()
        rb, ra = fake_bob.result, fake_alice.result
        if rb is not None:
            eve.report.sifted_a, eve.report.key_a = rb.sifted, rb.final_key
        if ra is not None:
            eve.report.sifted_b, eve.report.key_b = ra.sifted, ra.final_key


class Tamper(Strategy):
    """Relay everything but flip one bit of one classical message."""

    name = "tamper"
    variants = StraightforwardMITM.variants
    expected = {}

    def play(self, eve: Eve) -> None:
        n_msgs = len(eve.variant.messages())
        target = self.options.tamper_index
        if target is None:
            target = int(eve.rng.integers(0, n_msgs))
        count = 0
        moved = True
        while moved:
            moved = False
            for src, dst in ((eve.a, eve.b), (eve.b, eve.a)):
                while src.outbox:
                    item = eve.take(src)
                    forged = False
                    if isinstance(item, WireMessage):
                        if count == target:
                            item = _flip_one(item, eve.rng)
                            forged = True
                            eve.report.extras["tampered"] = item.msg_type.name
                        count += 1
                    direction = f"{src.name[0].upper()}->{dst.name[0].upper()}"
                    eve.give(dst, item, forged=forged, direction=direction)
                    moved = True


def _flip_one(msg: WireMessage, rng: np.random.Generator) -> WireMessage:
    sizes = np.array([len(f) for f in msg.fields])
    pos = int(rng.integers(0, sizes.sum()))
    index = int(np.searchsorted(np.cumsum(sizes), pos, side="right"))
    within = pos - int(sizes[:index].sum())
    return msg.with_field(index, msg.fields[index].flip([within]))


STRATEGIES = {cls.name: cls for cls in (
    P1InterleaveQM, P2OneSidedQM, P2BidirectionalQM, AInterceptResend, ADelayedIntercept,
    BMemory, BDelayedMemory, P3InterceptResend, BDelayedIntercept, OtpEcQM, OtpEcGuess,
    StraightforwardMITM, Tamper,
)}

# (bases sender, quantum memory, delayed) -> (strategy, variant)
MATRIX = {
    ("A", True, False): ("p1-interleave-qm", "P1"),
    ("A", True, True): ("p2-onesided-qm", "P2"),
    ("A", False, False): ("a-intercept-resend", "P1"),
    ("A", False, True): ("a-delayed-intercept", "P2"),
    ("B", True, False): ("b-memory", "P3"),
    ("B", True, True): ("b-delayed-memory", "P3D"),
    ("B", False, False): ("p3-intercept-resend", "P3"),
    ("B", False, True): ("b-delayed-intercept", "P3D"),
}


def get_strategy(name: str, options: AttackOptions | None = None) -> Strategy:
    try:
        return STRATEGIES[name](options)
    except KeyError:
        raise ValueError(f"unknown attack strategy {name!r}") from None


def matrix_cell(bases_sender: str, quantum_memory: bool, delayed: bool) -> tuple[Strategy, str]:
    """Strategy and variant for one cell of the attack matrix."""
    name, variant = MATRIX[(bases_sender, bool(quantum_memory), bool(delayed))]
    return get_strategy(name), variant


def execute_attack(strategy, variant, scheme, params=None, rng=None, pool=None):
    """Run one session of ``variant`` under ``strategy`` (name or instance)."""
    if isinstance(strategy, str):
        strategy = get_strategy(strategy)
    return run_protocol(get_variant(variant), scheme, params, adversary=strategy,
                        rng=rng, pool=pool)
