"""Hash families, tag schemes, exhaustive verifiers and bounds."""

from .bounds import BallBound, ball_size, collision_ball_success_bound, its_key_bits, two_step_key_bits
from .families import Au2FamilySpec, Su2FamilySpec, Su2Key, poly_au2_eval, poly_au2_int, su2_eval
from .gf2 import GF2n, reduction_polynomial
from .public import PublicHashSpec, public_hash, public_hash_int
from .schemes import (
    AuthKind,
    AuthScheme,
    KeyConsumption,
    TagKey,
    its_minimal_width,
    key_consumption,
    tag_digest,
    two_step_tag,
    verify_tag,
)
from .verify import (
    CompositionReport,
    EnumerationGuardError,
    FamilyVerdict,
    HashFamily,
    collision_epsilon,
    verify_composition_theorem,
    verify_family,
)

__all__ = [
    "AuthKind", "AuthScheme", "Au2FamilySpec", "BallBound", "CompositionReport",
    "EnumerationGuardError", "FamilyVerdict", "GF2n", "HashFamily", "KeyConsumption",
    "PublicHashSpec", "Su2FamilySpec", "Su2Key", "TagKey", "ball_size",
    "collision_ball_success_bound", "collision_epsilon", "its_key_bits",
    "its_minimal_width", "key_consumption", "poly_au2_eval", "poly_au2_int",
    "public_hash", "public_hash_int", "reduction_polynomial", "su2_eval",
    "tag_digest", "two_step_key_bits", "two_step_tag", "verify_composition_theorem",
    "verify_family", "verify_tag",
]
