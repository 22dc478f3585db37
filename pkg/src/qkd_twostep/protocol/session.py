"""Running a session and judging its outcome.

:func:`run_protocol` wires Alice and Bob to either an honest relay or an
adversary.  The adversary gets an :class:`Endpoint` for each party and
decides what each party receives.  After the run the sifted and final
keys of all three players are compared and labelled.

Correlation cases
-----------------
Relations between two sifted keys:

``=``  equal, and Eve has no uncertain positions in her copy;
``~``  equal length, disagreement at most ``CLOSE_RATE`` and at most
       that fraction of Eve's bits are guesses;
``!~`` anything else.

Counting guessed bits matters when Eve measured in random bases: her copy
may coincide bit for bit with another string while half of it is
guesswork, and such a copy is not usable.

With ``(rel(kA, kEA), rel(kEA, kEB), rel(kEB, kB))``, where the middle
relation treats ``=`` as ``~``:

- case 1: ``(=, ~, ~)``, the middle and right relations may also be ``=``
- case 2: ``(=, !~, =)``
- case 3: ``(~, !~, ~)``, either outer relation may also be ``=``
- case 4: ``(!~, !~, =)``

Case 2 is tested before case 3 because it is the sharper statement.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from ..bits import BitString
from ..hashing import AuthScheme
from ..quantum import EMPTY
from .ledger import KeyLedger
from .parties import RECV, Alice, Bob, PartyResult, SessionParams, setup_bits
from .reconcile import select_code
from .variants import Variant, get_variant
from .wire import WireMessage

__all__ = [
    "Endpoint",
    "EveReport",
    "SessionOutcome",
    "AttackContext",
    "TraceEvent",
    "run_protocol",
    "relay",
    "relation",
    "correlation_case",
    "final_relation",
    "required_pool_bits",
    "CLOSE_RATE",
    "EQUAL",
    "CLOSE",
    "FAR",
]

CLOSE_RATE = 0.11
EQUAL, CLOSE, FAR = "=", "~", "!~"

THREE_WAY = "KA=KE=KB"
SEPARATE = "separate-worlds"
ONE_SIDED = "KA!=KE=KB"
ABORT = "abort"
OTHER = "other"


class Endpoint:
    """Driver-side handle on one party's generator.

    ``outbox`` holds items the party has emitted and nobody has taken yet.
    ``waiting`` is true when the party is blocked on a receive.
    """

    def __init__(self, gen, name: str) -> None:
        self.name = name
        self._gen = gen
        self.outbox: deque = deque()
        self.waiting = False
        self.done = False
        self.result: PartyResult | None = None
        self._advance(None)

    def _advance(self, value) -> None:
        try:
            cmd = self._gen.send(value)
            while cmd is not RECV:
                self.outbox.append(cmd.item)
                cmd = self._gen.send(None)
            self.waiting = True
        except StopIteration as stop:
            self.done = True
            self.waiting = False
            self.result = stop.value

    def take(self):
        if not self.outbox:
            raise LookupError(f"{self.name} has nothing to send")
        return self.outbox.popleft()

    def give(self, item) -> bool:
        """Deliver ``item``; returns False when the party is no longer listening."""
        if not self.waiting:
            return False
        self.waiting = False
        self._advance(item)
        return True

    def close(self) -> None:
        """Stop a party that is still waiting (it never gets its message)."""
        if not self.done:
            self._gen.close()
            self.done = True
            self.waiting = False


@dataclass(frozen=True)
class TraceEvent:
    """One delivered item: who sent it, to whom, and what happened to it."""

    direction: str
    kind: str
    forged: bool = False
    weight: int | None = None
    candidates_tested: int | None = None
    note: str = ""

    def as_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v not in (None, "")}


def _kind(item) -> str:
    if isinstance(item, WireMessage):
        return item.describe()
    return f"Q[{len(item)}]"


def relay(alice: Endpoint, bob: Endpoint, events: list | None = None) -> None:
    """Deliver everything unchanged until neither side makes progress."""
    moved = True
    while moved:
        moved = False
        for src, dst, tag in ((alice, bob, "A->B"), (bob, alice, "B->A")):
            while src.outbox:
                item = src.take()
                if dst.give(item):
                    moved = True
                    if events is not None:
                        events.append(TraceEvent(tag, _kind(item)))


@dataclass
class EveReport:
    """Eve's view at the end of an attack.

    Attributes
    ----------
    sifted_a, sifted_b : BitString, optional
        Her sifted keys shared with Alice and with Bob.
    uncertain_a, uncertain_b : set of int
        Positions of those keys whose value she could only guess.
    key_a, key_b : BitString, optional
        Final keys she believes Alice and Bob hold.
    extras : dict
        Strategy-specific facts (recovered pad, guessed bits, ...).
    """

    sifted_a: BitString | None = None
    sifted_b: BitString | None = None
    uncertain_a: set = field(default_factory=set)
    uncertain_b: set = field(default_factory=set)
    key_a: BitString | None = None
    key_b: BitString | None = None
    forges: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)


@dataclass
class AttackContext:
    """What a strategy gets to work with."""

    alice: Endpoint
    bob: Endpoint
    variant: Variant
    scheme: AuthScheme
    params: SessionParams
    rng: np.random.Generator
    events: list


@dataclass
class SessionOutcome:
    """Verdict of one run.

    Attributes
    ----------
    key_a, key_b, key_e : BitString, optional
        Final keys; ``key_e`` is Eve's key when she holds one key shared
        with Bob (and possibly Alice).
    abort_by : str, optional
        ``"alice: <reason>"`` or ``"bob: <reason>"`` for the first abort.
    correlation_case : int, optional
        1 to 4, or ``None`` when no adversary ran or no pattern matched.
    final_relation : str
        One of ``KA=KE=KB``, ``separate-worlds``, ``KA!=KE=KB``, ``abort``,
        ``other``; ``None`` without adversary.
    qber_observed : float, optional
        Error rate Bob reported.
    raw_ab_disagreement : float, optional
        Disagreement of Alice's and Bob's raw bits on slots where their true
        bases agree.  This is a simulator view that neither party has.
    key_bits_consumed : int
        Alice's ledger cursor at the end of the run.
    """

    variant: str
    key_a: BitString | None
    key_b: BitString | None
    key_e: BitString | None
    abort_by: str | None
    correlation_case: int | None
    final_relation: str | None
    qber_observed: float | None
    raw_ab_disagreement: float | None
    key_bits_consumed: int
    tags_checked: int
    alice: PartyResult
    bob: PartyResult
    eve: EveReport | None = None
    relations: tuple | None = None
    events: list = field(default_factory=list)

    @property
    def keys_agree(self) -> bool:
        return (self.abort_by is None and self.key_a is not None
                and self.key_a == self.key_b)

    def summary(self) -> dict:
        forges = self.eve.forges if self.eve else []
        return {
            "variant": self.variant,
            "abort_by": self.abort_by,
            "correlation_case": self.correlation_case,
            "final_relation": self.final_relation,
            "keys_agree": self.keys_agree,
            "key_len": None if self.key_a is None else len(self.key_a),
            "qber_observed": self.qber_observed,
            "raw_ab_disagreement": self.raw_ab_disagreement,
            "key_bits_consumed": self.key_bits_consumed,
            "forges": [dict(f) for f in forges],
        }


# classification ----------------------------------------------------------
def relation(x: BitString | None, y: BitString | None, uncertain: int = 0) -> str:
    """Relation of two sifted keys given how many bits Eve had to guess."""
    if x is None or y is None or len(x) != len(y):
        return FAR
    if x == y and not uncertain:
        return EQUAL
    n = len(x)
    if n == 0:
        return CLOSE
    if uncertain / n > CLOSE_RATE or x.hamming(y) / n > CLOSE_RATE:
        return FAR
    return CLOSE


def correlation_case(rels: tuple[str, str, str]) -> int | None:
    left, mid, right = rels
    near = (EQUAL, CLOSE)
    if left == EQUAL and mid in near and right in near:
        return 1
    if left == EQUAL and mid == FAR and right == EQUAL:
        return 2
    if left in near and mid == FAR and right in near:
        return 3
    if left == FAR and mid == FAR and right == EQUAL:
        return 4
    return None


def final_relation(key_a, key_b, eve: EveReport, aborted: bool) -> str:
    if aborted or key_a is None or key_b is None:
        return ABORT
    if key_a == key_b:
        return THREE_WAY if eve.key_a == key_a else OTHER
    if eve.key_b == key_b:
        return SEPARATE if eve.key_a == key_a else ONE_SIDED
    return OTHER


def _raw_disagreement(a: PartyResult, b: PartyResult) -> float | None:
    if a.raw is None or b.raw is None:
        return None
    same = (a.bases == b.bases) & (b.bases != EMPTY)
    if not same.any():
        return None
    return float(np.mean(a.raw[same] != b.raw[same]))


def required_pool_bits(variant: Variant, scheme: AuthScheme, params: SessionParams) -> int:
    """Pre-shared bits for one session, OTP reserve included."""
    bits = setup_bits(variant, scheme)
    if variant.otp_ec:
        bits += select_code(params.error_estimate).syndrome_bits(params.n_slots)
    return bits


# driver ------------------------------------------------------------------
def run_protocol(variant, scheme: AuthScheme, params: SessionParams | None = None,
                 adversary=None, rng=None, pool: BitString | None = None) -> SessionOutcome:
    """Run one session, honestly relayed or under ``adversary``.

    Parameters
    ----------
    variant : str or Variant
    scheme : AuthScheme
    params : SessionParams, optional
    adversary : object with ``execute(ctx) -> EveReport``, optional
    rng : numpy Generator or seed
    pool : BitString, optional
        Pre-shared key; a fresh random pool of the exact size is used
        otherwise.

    Raises
    ------
    LedgerExhausted
        If ``pool`` is too short for the variant.
    """
    variant = get_variant(variant)
    params = params or SessionParams()
    rng = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    pool_rng, a_rng, b_rng, e_rng = rng.spawn(4)
    if pool is None:
        pool = BitString.random(required_pool_bits(variant, scheme, params), pool_rng)

    alice = Endpoint(Alice(variant, scheme, KeyLedger(pool), params, a_rng).run(), "alice")
    bob = Endpoint(Bob(variant, scheme, KeyLedger(pool), params, b_rng).run(), "bob")
    events: list = []
    eve = None
    if adversary is None:
        relay(alice, bob, events)
    else:
        ctx = AttackContext(alice, bob, variant, scheme, params, e_rng, events)
        eve = adversary.execute(ctx)
    for ep in (alice, bob):
        ep.close()
    ra = alice.result or PartyResult("alice", abort="did not finish")
    rb = bob.result or PartyResult("bob", abort="did not finish")
    if ra.abort is None and ra.final_key is None:
        ra.abort = "did not finish"
    if rb.abort is None and rb.final_key is None:
        rb.abort = "did not finish"
    return _outcome(variant, ra, rb, eve, events)


def _first_abort(ra: PartyResult, rb: PartyResult) -> str | None:
    real = [(r.role, r.abort) for r in (ra, rb) if r.abort and r.abort != "did not finish"]
    if real:
        return f"{real[0][0]}: {real[0][1]}"
    for r in (ra, rb):
        if r.abort:
            return f"{r.role}: {r.abort}"
    return None


def _outcome(variant: Variant, ra: PartyResult, rb: PartyResult,
             eve: EveReport | None, events: list) -> SessionOutcome:
    abort_by = _first_abort(ra, rb)
    case = rels = relation_label = key_e = None
    if eve is not None:
        ua, ub = len(eve.uncertain_a), len(eve.uncertain_b)
        rels = (relation(ra.sifted, eve.sifted_a, ua),
                relation(eve.sifted_a, eve.sifted_b, ua + ub),
                relation(eve.sifted_b, rb.sifted, ub))
        case = correlation_case(rels)
        relation_label = final_relation(ra.final_key, rb.final_key, eve, abort_by is not None)
        key_e = eve.key_b if eve.key_b is not None else eve.key_a
    return SessionOutcome(
        variant=variant.name,
        key_a=ra.final_key,
        key_b=rb.final_key,
        key_e=key_e,
        abort_by=abort_by,
        correlation_case=case,
        final_relation=relation_label,
        qber_observed=rb.error_rate,
        raw_ab_disagreement=_raw_disagreement(ra, rb),
        key_bits_consumed=ra.ledger_bits,
        tags_checked=ra.tags_checked + rb.tags_checked,
        alice=ra,
        bob=rb,
        eve=eve,
        relations=rels,
        events=events,
    )
