"""Exhaustive verification of universal-hash properties.

A finite family is represented by its value table ``table[h, m]``: row
``h`` is a member, column ``m`` an input, entries are outputs in
``range(n_outputs)``.  All measured quantities are exact ``Fraction``
values, so the composition identity can be checked with ``==``.

Definitions used throughout (``H`` the family, ``T`` the output set):

* ε-AU2: every pair of distinct inputs collides under at most ``ε|H|``
  members.
* ε-ASU2: (a) every input maps to every output under exactly ``|H|/|T|``
  members, and (b) for distinct inputs and any outputs ``t1, t2``, at most
  ``ε|H|/|T|`` members send the first input to ``t1`` and the second to
  ``t2``.
* SU2: ASU2 with ``ε = 1/|T|``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from ..bits import BitString
from .families import Au2FamilySpec, Su2FamilySpec, poly_au2_int, su2_int
from .gf2 import GF2n

__all__ = [
    "ENUMERATION_GUARD",
    "EnumerationGuardError",
    "HashFamily",
    "FamilyVerdict",
    "CompositionReport",
    "collision_epsilon",
    "verify_family",
    "verify_composition_theorem",
]

ENUMERATION_GUARD = 1 << 28
# Columns processed per vectorised bincount in the joint-count scan.
_BIN_BUDGET = 1 << 22


class EnumerationGuardError(ValueError):
    """Raised when an exhaustive check would exceed the evaluation budget."""


def _guard(count: int) -> None:
    if count > ENUMERATION_GUARD:
        raise EnumerationGuardError(
            f"{count} evaluations exceed the guard of {ENUMERATION_GUARD}")


@dataclass(frozen=True)
class HashFamily:
    """A finite hash family given by its full value table.

    Attributes
    ----------
    table : ndarray of int64, shape (n_members, n_inputs)
    n_outputs : int
    name : str
    """

    table: np.ndarray
    n_outputs: int
    name: str = "family"

    def __post_init__(self) -> None:
        t = np.asarray(self.table, dtype=np.int64)
        if t.ndim != 2:
            raise ValueError("value table must be two-dimensional")
        if t.size and (t.min() < 0 or t.max() >= self.n_outputs):
            raise ValueError("table entries outside the output range")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    @property
    def n_members(self) -> int:
        return self.table.shape[0]

    @property
    def n_inputs(self) -> int:
        return self.table.shape[1]

    @classmethod
    def all_functions(cls, n_inputs: int, n_outputs: int) -> "HashFamily":
        """Every function from ``n_inputs`` inputs to ``n_outputs`` outputs."""
        _guard(n_outputs ** n_inputs * n_inputs)
        rows = list(product(range(n_outputs), repeat=n_inputs))
        return cls(np.array(rows, dtype=np.int64).reshape(-1, n_inputs),
                   n_outputs, f"all[{n_inputs}->{n_outputs}]")

    @classmethod
    def su2(cls, z_bits: int, t_bits: int) -> "HashFamily":
        """Value table of the SU2 family on all ``z_bits`` digests."""
        spec = Su2FamilySpec(z_bits, t_bits)
        n_keys = 1 << spec.key_bits
        _guard(n_keys << z_bits)
        w = spec.field_bits
        if w <= 12:
            mult = GF2n(w).mul_table()[:, : 1 << z_bits]
            low = mult & ((1 << t_bits) - 1)
            b = np.arange(1 << t_bits, dtype=np.int64)
            table = (low[:, None, :] ^ b[None, :, None]).reshape(n_keys, 1 << z_bits)
        else:
            table = np.array([[su2_int(k, d) for d in range(1 << z_bits)]
                              for k in spec.all_keys()], dtype=np.int64)
        return cls(table, 1 << t_bits, f"su2[z={z_bits},t={t_bits}]")

    @classmethod
    def poly_au2(cls, family: Au2FamilySpec, message_bits: int) -> "HashFamily":
        """Value table of the polynomial family on all messages of a length."""
        z = family.z_bits
        _guard((1 << z) << message_bits)
        messages = [BitString.from_int(v, message_bits) for v in range(1 << message_bits)]
        table = np.array([[poly_au2_int(family, s, m) for m in messages]
                          for s in range(1 << z)], dtype=np.int64)
        return cls(table, 1 << z, f"poly[z={z},blocks<={family.max_blocks}]")

    def compose(self, outer: "HashFamily") -> "HashFamily":
        """Family ``{h o f}`` over all pairs of members, ``f`` from ``self``."""
        if outer.n_inputs != self.n_outputs:
            raise ValueError("outer family inputs must match inner outputs")
        _guard(self.n_members * outer.n_members * self.n_inputs)
        table = outer.table[:, self.table]  # (n_outer, n_inner, n_inputs)
        table = table.transpose(1, 0, 2).reshape(-1, self.n_inputs)
        return HashFamily(table, outer.n_outputs, f"{outer.name}o{self.name}")


@dataclass(frozen=True)
class FamilyVerdict:
    """Outcome of an exhaustive family check.

    Attributes
    ----------
    kind : str
        Property that was claimed: ``"AU2"``, ``"SU2"`` or ``"ASU2"``.
    measured_epsilon : Fraction
        Worst collision fraction (AU2) or worst conditional fraction
        (SU2/ASU2), computed exactly.
    bound_epsilon : Fraction
        Claimed value.
    is_au2, is_su2, is_asu2 : bool
        ``is_au2`` compares the pairwise collision fraction to the claim;
        ``is_su2`` and ``is_asu2`` require condition (a) as well.
    condition_a : bool
        Every input hits every output exactly ``|H|/|T|`` times.
    worst_pair : tuple
        ``(m1, m2, t1, t2)`` achieving ``measured_epsilon``; for AU2 the
        outputs are the shared value under the first colliding member.
    verdict : bool
        Whether the claimed property holds.
    """

    kind: str
    measured_epsilon: Fraction
    bound_epsilon: Fraction
    is_au2: bool
    is_su2: bool
    is_asu2: bool
    condition_a: bool
    worst_pair: tuple
    collision_epsilon: Fraction = field(default=Fraction(0))

    @property
    def verdict(self) -> bool:
        return {"AU2": self.is_au2, "SU2": self.is_su2, "ASU2": self.is_asu2}[self.kind]


def collision_epsilon(family: HashFamily) -> tuple[Fraction, tuple]:
    """Exact AU2 constant: worst pairwise collision fraction and its pair."""
    table = family.table
    n = family.n_inputs
    best, pair = -1, (0, 1, 0, 0)
    for m1 in range(n - 1):
        eq = (table[:, m1:m1 + 1] == table[:, m1 + 1:]).sum(axis=0)
        j = int(eq.argmax())
        if eq[j] > best:
            best = int(eq[j])
            m2 = m1 + 1 + j
            hit = np.flatnonzero(table[:, m1] == table[:, m2])
            t = int(table[hit[0], m1]) if hit.size else int(table[0, m1])
            pair = (m1, m2, t, t)
    if n < 2:
        return Fraction(0), pair
    return Fraction(best, family.n_members), pair


def _condition_a(family: HashFamily) -> bool:
    n_h, n_t = family.n_members, family.n_outputs
    if n_h % n_t:
        return False
    offsets = np.arange(family.n_inputs, dtype=np.int64) * n_t
    counts = np.bincount((family.table + offsets).ravel(),
                         minlength=family.n_inputs * n_t)
    return bool(np.all(counts == n_h // n_t))


def _worst_joint(family: HashFamily) -> tuple[int, tuple]:
    """Largest number of members mapping (m1, m2) to (t1, t2), m1 != m2."""
    table = family.table
    n_h, n_in = table.shape
    n_t = family.n_outputs
    t2 = n_t * n_t
    chunk = max(1, _BIN_BUDGET // t2)
    best, arg = -1, (0, 1, 0, 0)
    for m1 in range(n_in - 1):
        base = table[:, m1] * n_t
        for start in range(m1 + 1, n_in, chunk):
            cols = table[:, start:start + chunk]
            k = cols.shape[1]
            codes = base[:, None] + cols + np.arange(k, dtype=np.int64) * t2
            counts = np.bincount(codes.ravel(), minlength=k * t2).reshape(k, t2)
            flat = int(counts.argmax())
            value = int(counts.flat[flat])
            if value > best:
                col, code = divmod(flat, t2)
                best = value
                arg = (m1, start + col, code // n_t, code % n_t)
    return best, arg


def verify_family(family: HashFamily, kind: str, epsilon) -> FamilyVerdict:
    """Check a claimed universality property by full enumeration.

    Parameters
    ----------
    family : HashFamily
    kind : {"AU2", "SU2", "ASU2"}
    epsilon : Fraction or int or str
        Claimed constant.  For ``"SU2"`` it should be ``1/|T|``.

    Returns
    -------
    FamilyVerdict

    Raises
    ------
    EnumerationGuardError
        If the table or the pair scan is beyond the evaluation budget.
    """
    kind = kind.upper()
    if kind not in {"AU2", "SU2", "ASU2"}:
        raise ValueError(f"unknown property {kind!r}")
    claim = Fraction(epsilon)
    _guard(family.n_members * family.n_inputs)
    coll, coll_pair = collision_epsilon(family)
    if kind == "AU2":
        return FamilyVerdict(kind, coll, claim, coll <= claim, False, False,
                             _condition_a(family), coll_pair, coll)
    cond_a = _condition_a(family)
    joint, pair = _worst_joint(family)
    n_t = family.n_outputs
    measured = Fraction(joint * n_t, family.n_members)
    is_asu2 = cond_a and measured <= claim
    is_su2 = cond_a and measured <= Fraction(1, n_t)
    return FamilyVerdict(kind, measured, claim, coll <= claim, is_su2, is_asu2,
                         cond_a, pair, coll)


@dataclass(frozen=True)
class CompositionReport:
    """Exact check of ``eps = eps'(1 - 1/|T|) + 1/|T|`` on one instance."""

    epsilon_prime_f: Fraction
    epsilon_g: Fraction
    formula_epsilon: Fraction
    identity_holds: bool
    iff_holds: bool
    sizes: tuple[int, int, int]


def verify_composition_theorem(inner: HashFamily, outer: HashFamily) -> CompositionReport:
    """Compose ``G = H o F`` and test the composition theorem exactly.

    The identity compares the measured ASU2 constant of ``G`` with the
    formula applied to the measured AU2 constant of ``F``.  The
    biconditional is checked for every claim ``k/|F|``: ``F`` is
    ``eps'``-AU2 exactly when ``G`` is ``formula(eps')``-ASU2.

    Raises
    ------
    ValueError
        If ``outer`` is not SU2.
    """
    n_t = outer.n_outputs
    pre = verify_family(outer, "SU2", Fraction(1, n_t))
    if not pre.is_su2:
        raise ValueError("outer family failed the SU2 precheck")
    eps_f, _ = collision_epsilon(inner)
    g = inner.compose(outer)
    joint, _ = _worst_joint(g)
    eps_g = Fraction(joint * n_t, g.n_members)
    cond_a = _condition_a(g)
    inv_t = Fraction(1, n_t)

    def formula(e: Fraction) -> Fraction:
        return e * (1 - inv_t) + inv_t

    iff = cond_a
    for k in range(inner.n_members + 1):
        claim = Fraction(k, inner.n_members)
        iff &= (eps_f <= claim) == (eps_g <= formula(claim))
    return CompositionReport(eps_f, eps_g, formula(eps_f), eps_g == formula(eps_f),
                             bool(iff), (inner.n_inputs, inner.n_outputs, n_t))
