"""Message authentication schemes built from the hash families.

Every scheme produces a tag ``h_K(d)`` where ``h_K`` is drawn from the SU2
family and ``d`` is a digest of the message.  The schemes differ in how the
digest is formed:

=================  ===================================================
``two-step``       ``d = f(m)``
``salted``         ``d = f(salt || m)`` with a public constant salt
``nonce-alice``    ``d = f(nonce || m)``, nonce chosen by Alice, public
``nonce-bob``      same, nonce chosen by Bob
``fixed-secret``   ``d = f(S || m)``, one secret ``S`` per session
``fresh-secret``   ``d = f(S || m)``, fresh secret ``S`` per message
``its-composed``   ``d = f_S(m)``, ``f_S`` from the polynomial AU2 family
=================  ===================================================

Only the last one is information-theoretically secure.  The first four
leave the digest computable by anyone, so a collision of ``f`` is a tag
forgery.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from ..bits import BitString
from .families import Au2FamilySpec, Su2FamilySpec, Su2Key, poly_au2_int, su2_int
from .public import PublicHashSpec, public_hash_int

__all__ = [
    "AuthKind",
    "AuthScheme",
    "TagKey",
    "DEFAULT_SALT",
    "two_step_tag",
    "verify_tag",
    "tag_digest",
    "KeyConsumption",
    "key_consumption",
    "its_minimal_width",
]

DEFAULT_SALT = BitString.from_int(0x6A09E667F3BCC908, 64)  # sqrt(2) fraction bits


class AuthKind(str, Enum):
    TWO_STEP = "two-step"
    SALTED = "salted"
    NONCE_ALICE = "nonce-alice"
    NONCE_BOB = "nonce-bob"
    FIXED_SECRET = "fixed-secret"
    FRESH_SECRET = "fresh-secret"
    ITS_COMPOSED = "its-composed"


_PUBLIC_DIGEST = {AuthKind.TWO_STEP, AuthKind.SALTED,
                  AuthKind.NONCE_ALICE, AuthKind.NONCE_BOB}


@dataclass(frozen=True)
class AuthScheme:
    """How tags are produced and checked.

    Attributes
    ----------
    kind : AuthKind
    public_hash : PublicHashSpec
        The keyless hash ``f``.  Unused for tags by ``its-composed`` but
        still available to the protocol for public derivations.
    t_bits : int
        Tag width.
    salt : BitString, optional
        Public prefix for ``salted``.
    secret_bits : int
        Length of the secret prefix for the secret variants.
    nonce_bits : int
        Length of the public nonce for the nonce variants.
    au2 : Au2FamilySpec, optional
        Inner family for ``its-composed``.
    """

    kind: AuthKind
    public_hash: PublicHashSpec
    t_bits: int
    salt: BitString | None = None
    secret_bits: int = 0
    nonce_bits: int = 64
    au2: Au2FamilySpec | None = None

    def __post_init__(self) -> None:
        if self.t_bits < 1:
            raise ValueError("t_bits must be positive")
        if self.kind is AuthKind.SALTED and self.salt is None:
            raise ValueError("salted scheme needs a salt")
        if self.kind in (AuthKind.FIXED_SECRET, AuthKind.FRESH_SECRET) and self.secret_bits < 1:
            raise ValueError("secret variants need secret_bits >= 1")
        if self.kind is AuthKind.ITS_COMPOSED and self.au2 is None:
            raise ValueError("its-composed scheme needs an AU2 family")

    # constructors -----------------------------------------------------
    @classmethod
    def two_step(cls, z_bits: int, t_bits: int, **kw) -> "AuthScheme":
        return cls(AuthKind.TWO_STEP, PublicHashSpec(z_bits, **kw), t_bits)

    @classmethod
    def salted(cls, z_bits: int, t_bits: int, salt: BitString = DEFAULT_SALT) -> "AuthScheme":
        return cls(AuthKind.SALTED, PublicHashSpec(z_bits), t_bits, salt=salt)

    @classmethod
    def nonce(cls, z_bits: int, t_bits: int, chooser: str = "alice",
              nonce_bits: int = 64) -> "AuthScheme":
        kind = AuthKind.NONCE_ALICE if chooser == "alice" else AuthKind.NONCE_BOB
        return cls(kind, PublicHashSpec(z_bits), t_bits, nonce_bits=nonce_bits)

    @classmethod
    def fixed_secret(cls, z_bits: int, t_bits: int, secret_bits: int = 64) -> "AuthScheme":
        return cls(AuthKind.FIXED_SECRET, PublicHashSpec(z_bits), t_bits,
                   secret_bits=secret_bits)

    @classmethod
    def fresh_secret(cls, z_bits: int, t_bits: int,
                     secret_bits: int | None = None) -> "AuthScheme":
        return cls(AuthKind.FRESH_SECRET, PublicHashSpec(z_bits), t_bits,
                   secret_bits=t_bits if secret_bits is None else secret_bits)

    @classmethod
    def its_composed(cls, t_bits: int, au2_bits: int = 32,
                     max_message_bits: int = 1 << 20, z_bits: int = 16) -> "AuthScheme":
        """ITS scheme whose inner family handles ``max_message_bits``.

        ``z_bits`` only sizes the public hash kept for non-tag uses.
        """
        au2 = Au2FamilySpec.for_message_bits(au2_bits, max_message_bits)
        if au2.max_blocks - 1 > 1 << max(au2_bits - t_bits, 0):
            raise ValueError("AU2 width too small for an ITS tag at this length")
        return cls(AuthKind.ITS_COMPOSED, PublicHashSpec(z_bits), t_bits, au2=au2)

    # derived shapes ---------------------------------------------------
    @property
    def public_digest(self) -> bool:
        """True when anyone can evaluate the digest (forgeable by collision)."""
        return self.kind in _PUBLIC_DIGEST

    @property
    def uses_nonce(self) -> bool:
        return self.kind in (AuthKind.NONCE_ALICE, AuthKind.NONCE_BOB)

    @property
    def digest_bits(self) -> int:
        if self.kind is AuthKind.ITS_COMPOSED:
            return self.au2.z_bits
        return self.public_hash.z_bits

    @property
    def su2(self) -> Su2FamilySpec:
        return Su2FamilySpec(self.digest_bits, self.t_bits)

    @property
    def per_message_secret_bits(self) -> int:
        if self.kind is AuthKind.FRESH_SECRET:
            return self.secret_bits
        if self.kind is AuthKind.ITS_COMPOSED:
            return self.au2.z_bits
        return 0

    @property
    def session_secret_bits(self) -> int:
        return self.secret_bits if self.kind is AuthKind.FIXED_SECRET else 0

    def digest_input(self, message: BitString, prefix: BitString | None = None) -> BitString:
        """Bits fed to ``f`` for the public-prefix and secret-prefix variants."""
        if self.kind is AuthKind.SALTED:
            return self.salt + message
        if prefix is None:
            return message
        return prefix + message


@dataclass(frozen=True)
class TagKey:
    """Key material for one tag: the SU2 member and an optional secret."""

    su2: Su2Key
    secret: BitString | None = None


def _check_prefix(scheme: AuthScheme, secret, nonce) -> BitString | None:
    kind = scheme.kind
    if kind in (AuthKind.FIXED_SECRET, AuthKind.FRESH_SECRET, AuthKind.ITS_COMPOSED):
        if secret is None:
            raise ValueError(f"{kind.value} tags need a secret")
        if nonce is not None:
            raise ValueError(f"{kind.value} tags take no nonce")
        return secret
    if secret is not None:
        raise ValueError(f"{kind.value} tags take no secret")
    if scheme.uses_nonce:
        if nonce is None:
            raise ValueError("nonce scheme needs the public nonce")
        return nonce
    if nonce is not None:
        raise ValueError(f"{kind.value} tags take no nonce")
    return None


def tag_digest(scheme: AuthScheme, message: BitString,
               secret: BitString | None = None, nonce: BitString | None = None) -> int:
    """Integer digest that the SU2 member is applied to."""
    prefix = _check_prefix(scheme, secret, nonce)
    if scheme.kind is AuthKind.ITS_COMPOSED:
        return poly_au2_int(scheme.au2, prefix.to_int(), message)
    return public_hash_int(scheme.public_hash, scheme.digest_input(message, prefix))


def two_step_tag(scheme: AuthScheme, key: Su2Key | TagKey, message: BitString,
                 per_message_secret: BitString | None = None,
                 nonce: BitString | None = None) -> BitString:
    """Tag ``h_K(digest(m))`` for any scheme variant.

    Parameters
    ----------
    scheme : AuthScheme
    key : Su2Key or TagKey
        A bare SU2 key, or a bundle that also carries the secret.
    message : BitString
    per_message_secret : BitString, optional
        Secret prefix (or AU2 point) when not bundled in ``key``.
    nonce : BitString, optional
        Public nonce for the nonce variants.

    Raises
    ------
    ValueError
        If a secret or nonce is missing where required or supplied where
        forbidden.
    """
    if isinstance(key, TagKey):
        if per_message_secret is None:
            per_message_secret = key.secret
        key = key.su2
    if key.family != scheme.su2:
        raise ValueError("SU2 key does not match the scheme's family")
    digest = tag_digest(scheme, message, per_message_secret, nonce)
    return BitString.from_int(su2_int(key, digest), scheme.t_bits)


def verify_tag(scheme: AuthScheme, key: Su2Key | TagKey, message: BitString,
               tag: BitString | None, nonce: BitString | None = None) -> bool:
    if tag is None or len(tag) != scheme.t_bits:
        return False
    return two_step_tag(scheme, key, message, nonce=nonce) == tag


@dataclass(frozen=True)
class KeyConsumption:
    """Secret key spent by a scheme.

    Attributes
    ----------
    bits_per_tag : int
        Fresh key bits drawn for every tag.
    session_bits : int
        Bits drawn once per session (the fixed secret).
    max_message_bits : int or None
        Longest message the scheme authenticates at its stated security;
        ``None`` when unbounded.
    """

    bits_per_tag: int
    session_bits: int = 0
    max_message_bits: int | None = None


def _its_capacity(z_bits: int, t_bits: int) -> int:
    # ceil(L / z) <= 2^(z - t) keeps the AU2 bound at or below 2^-t.
    return z_bits << max(z_bits - t_bits, 0)


def its_minimal_width(message_bits: int, t_bits: int) -> int:
    """Smallest AU2 width that authenticates ``message_bits`` at 2^-t."""
    z = t_bits
    while _its_capacity(z, t_bits) < message_bits:
        z += 1
    return z


def key_consumption(scheme: AuthScheme, message_bits: int | None = None) -> KeyConsumption:
    """Key bits a scheme needs per tag.

    Raises
    ------
    ValueError
        If ``message_bits`` exceeds what the scheme can authenticate.
    """
    su2_bits = scheme.su2.key_bits
    if scheme.kind is AuthKind.ITS_COMPOSED:
        z = scheme.au2.z_bits
        cap = min(scheme.au2.max_message_bits, _its_capacity(z, scheme.t_bits))
        if message_bits is not None and message_bits > cap:
            raise ValueError(f"{message_bits} bits exceed ITS capacity {cap}")
        return KeyConsumption(z + su2_bits, 0, cap)
    return KeyConsumption(su2_bits + scheme.per_message_secret_bits,
                          scheme.session_secret_bits, None)
