"""Bound calculators, Monte Carlo cross-checks and family verifiers.

Every function returns a plain ``dict`` that serialises to JSON as is
(``Fraction`` values become ``"p/q"`` strings via :func:`to_json`).
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..adversary import (
    CraftError,
    MutationSpace,
    craft_bases_mask,
    find_colliding_message,
    subsequence_probability,
)
from ..bits import BitString
from ..hashing import (
    HashFamily,
    PublicHashSpec,
    Su2FamilySpec,
    collision_ball_success_bound,
    its_key_bits,
    public_hash_int,
    two_step_key_bits,
    verify_composition_theorem,
    verify_family,
)
from ..hashing.families import su2_int
from ..protocol import MsgType, WireMessage

__all__ = [
    "BOUND_KINDS",
    "MESSAGE_SIZES",
    "VERIFY_SELECTORS",
    "bound_calc",
    "eq9_report",
    "key_consumption_table",
    "lemma1_monte_carlo",
    "lemma2_monte_carlo",
    "subsequence_brute_force",
    "tag_guess_trials",
    "to_json",
    "verify_cmd",
]

BOUND_KINDS = ("lemma1", "lemma2", "subseq-exact", "key-consumption", "eq9")
VERIFY_SELECTORS = ("composed", "all-functions", "constant", "su2", "non-au2")

# Decimal prefixes, as in "one terabit of data".
MESSAGE_SIZES = {
    "terabit": 10 ** 12,
    "petabit": 10 ** 15,
    "exabit": 10 ** 18,
    "zettabit": 10 ** 21,
    "yottabit": 10 ** 24,
}


def to_json(value):
    """Replace ``Fraction`` values by ``"p/q"`` strings, recursively."""
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, dict):
        return {k: to_json(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_json(v) for v in value]
    return value


def _sigma(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n) if n else 0.0


# Forging by ball search ---------------------------------------------------
def lemma1_monte_carlo(ell: int = 64, w: int = 3, z_bits: int = 12, t_bits: int = 16,
                       trials: int = 1000, seed: int = 0) -> dict:
    """Forge frequency against fresh SU2 keys, next to the ball bound.

    Each trial draws an intercepted ``ell``-bit field, its tag under a
    fresh SU2 key and an independent field Eve would like to send.  Eve
    searches the radius-``w`` ball around her field for a digest
    collision; the trial succeeds if the victim accepts the result.
    """
    rng = np.random.default_rng(seed)
    spec = PublicHashSpec(z_bits)
    family = Su2FamilySpec(z_bits, t_bits)
    bound = collision_ball_success_bound(ell, w, z_bits)
    wins = 0
    candidates = 0
    for _ in range(trials):
        key = family.key_from_bits(BitString.random(family.key_bits, rng))
        sent = WireMessage(1, MsgType.S2, (BitString.random(ell, rng),))
        wanted = WireMessage(1, MsgType.S2, (BitString.random(ell, rng),))
        digest = public_hash_int(spec, sent.frame_bits())
        tag = su2_int(key, digest)
        space = MutationSpace(wanted, 0, tuple(range(ell)), w_max=w)
        res = find_colliding_message(space, digest, spec)
        candidates += res.candidates_tested
        if res.found and su2_int(key, public_hash_int(spec, res.message.frame_bits())) == tag:
            wins += 1
    rate = wins / trials if trials else 0.0
    sigma = _sigma(bound.full, trials)
    return {
        "kind": "lemma1", "ell": ell, "w": w, "z_bits": z_bits, "t_bits": t_bits,
        "ball_size": bound.ball_size, "bound_full": bound.full, "bound_loose": bound.loose,
        "trials": trials, "successes": wins, "rate": rate, "sigma": sigma,
        "threshold": bound.full - 3 * sigma, "mean_candidates": candidates / max(trials, 1),
    }


# Mask crafting ------------------------------------------------------------
def lemma2_monte_carlo(n: int = 1024, k: int = 64, trials: int = 10_000, seed: int = 0) -> dict:
    """Mask-crafting success for ``n//2 - k`` target bits, next to the bound."""
    rng = np.random.default_rng(seed)
    m = n // 2 - k
    bound = -math.expm1(-2 * k * k / n)
    wins = 0
    for _ in range(trials):
        raw = rng.integers(0, 2, n, dtype=np.int8)
        target = rng.integers(0, 2, m, dtype=np.int8)
        try:
            craft_bases_mask(raw, target, k)
        except CraftError:
            continue
        wins += 1
    rate = wins / trials if trials else 0.0
    sigma = _sigma(bound, trials)
    return {
        "kind": "lemma2", "n": n, "k": k, "target_bits": m, "bound": bound,
        "trials": trials, "successes": wins, "rate": rate, "sigma": sigma,
        "threshold": bound - 3 * sigma,
    }


# Subsequence oracle -------------------------------------------------------
def subsequence_brute_force(s, n: int) -> Fraction:
    """Fraction of all ``n``-bit strings containing ``s`` as a subsequence."""
    s = np.asarray(s, dtype=np.int64).reshape(-1)
    m = s.size
    if m > n:
        return Fraction(0)
    hosts = (np.arange(1 << n)[:, None] >> np.arange(n)[None, :]) & 1
    want = np.append(s, -1)
    matched = np.zeros(1 << n, dtype=np.int64)
    for j in range(n):
        matched += hosts[:, j] == want[matched]
    return Fraction(int(np.count_nonzero(matched == m)), 1 << n)


def _subseq_report(n_max: int = 12, brute: bool = True) -> dict:
    rows = []
    all_equal = True
    for n in range(1, n_max + 1):
        for m in range(1, n + 1):
            exact = subsequence_probability(m, n)
            row = {"m": m, "n": n, "probability": exact}
            if brute:
                pattern = np.arange(m) % 2
                row["brute_force"] = subsequence_brute_force(pattern, n)
                all_equal &= row["brute_force"] == exact
            rows.append(row)
    return {"kind": "subseq-exact", "n_max": n_max, "rows": rows,
            "all_equal": all_equal if brute else None}


# Key consumption -----------------------------------------------------------
def key_consumption_table(z_bits: int = 256, t_bits: int = 64) -> dict:
    """Two-step and ITS key bits, plus ITS cost for the named message sizes."""
    its_fixed = 2 * z_bits + t_bits
    by_size = {}
    for name, bits in MESSAGE_SIZES.items():
        width, total = its_key_bits(bits, t_bits)
        by_size[name] = {"message_bits": bits, "au2_bits": width, "key_bits": total}
    return {
        "kind": "key-consumption", "z_bits": z_bits, "t_bits": t_bits,
        "two_step_bits": two_step_key_bits(z_bits, t_bits),
        "its_bits": its_fixed,
        "sizes": by_size,
    }


def eq9_report(message_bits: int, z_bits: int, t_bits: int) -> dict:
    """Lower bound on the AU2 family size and the polynomial family's reach.

    With ``eps' = 1/|T|`` the bound reads
    ``|F| > |T| * ceil(log|M| / log|Z| - 1)``; polynomial hashing with
    ``|F| = |Z|`` handles ``log|M| < (|Z|/|T| + 1) log|Z|``.
    """
    if min(message_bits, z_bits, t_bits) < 1:
        raise ValueError("sizes must be positive")
    blocks = max(math.ceil(Fraction(message_bits, z_bits) - 1), 0)
    bound_log2 = t_bits + (math.log2(blocks) if blocks else -math.inf)
    applies = None
    if message_bits > z_bits:
        # eps'|Z| > 1 + log|Z| / (log|M| - log|Z|) with eps' = 1/|T|
        lhs = Fraction(2) ** (z_bits - t_bits)
        applies = lhs > 1 + Fraction(z_bits, message_bits - z_bits)
    max_bits_log2 = math.log2((2.0 ** (z_bits - t_bits) + 1) * z_bits)
    return {
        "kind": "eq9", "message_bits": message_bits, "z_bits": z_bits, "t_bits": t_bits,
        "family_size_log2_lower": bound_log2, "polynomial_family_log2": z_bits,
        "polynomial_suffices": z_bits > bound_log2, "bound_applies": applies,
        "max_message_bits_log2": max_bits_log2,
        "within_reach": math.log2(message_bits) < max_bits_log2,
    }


def bound_calc(kind: str, **params) -> dict:
    """Calculator front end.

    Parameters
    ----------
    kind : {"lemma1", "lemma2", "subseq-exact", "key-consumption", "eq9"}
    **params
        ``lemma1``: ell, w, z_bits, [trials, seed, t_bits]
        ``lemma2``: n, k, [trials, seed]
        ``subseq-exact``: n_max, [brute]
        ``key-consumption``: z_bits, t_bits
        ``eq9``: message_bits, z_bits, t_bits

    Raises
    ------
    ValueError
        On an unknown kind or parameters outside their domain.
    """
    if kind == "lemma1":
        ell, w, z = params.get("ell", 64), params.get("w", 3), params.get("z_bits", 12)
        trials = params.get("trials", 0)
        if trials:
            return lemma1_monte_carlo(ell, w, z, params.get("t_bits", 16), trials,
                                      params.get("seed", 0))
        b = collision_ball_success_bound(ell, w, z)
        return {"kind": kind, "ell": ell, "w": w, "z_bits": z, "ball_size": b.ball_size,
                "bound_full": b.full, "bound_loose": b.loose}
    if kind == "lemma2":
        n, k = params.get("n", 1024), params.get("k", 64)
        if n < 2 or not 0 <= k <= n // 2:
            raise ValueError("need n >= 2 and 0 <= k <= n // 2")
        trials = params.get("trials", 0)
        if trials:
            return lemma2_monte_carlo(n, k, trials, params.get("seed", 0))
        return {"kind": kind, "n": n, "k": k, "target_bits": n // 2 - k,
                "bound": -math.expm1(-2 * k * k / n)}
    if kind == "subseq-exact":
        n_max = params.get("n_max", 12)
        if not 1 <= n_max <= 20:
            raise ValueError("n_max must lie in [1, 20]")
        return _subseq_report(n_max, params.get("brute", True))
    if kind == "key-consumption":
        return key_consumption_table(params.get("z_bits", 256), params.get("t_bits", 64))
    if kind == "eq9":
        return eq9_report(params.get("message_bits", 10 ** 12), params.get("z_bits", 98),
                          params.get("t_bits", 64))
    raise ValueError(f"unknown bound kind {kind!r}")


# Tag guessing --------------------------------------------------------------
def tag_guess_trials(z_bits: int = 12, t_bits: int = 16, guesses: int = 100_000,
                     seed: int = 0) -> dict:
    """Acceptance rate of tags computed under Eve's own random SU2 keys.

    This is the only move a straightforward man in the middle has against
    a party holding a key she does not know.
    """
    rng = np.random.default_rng(seed)
    family = Su2FamilySpec(z_bits, t_bits)
    spec = PublicHashSpec(z_bits)
    accepted = 0
    for _ in range(guesses):
        digest = public_hash_int(spec, BitString.random(64, rng))
        real_tag = su2_int(_key(family, rng), digest)
        accepted += su2_int(_key(family, rng), digest) == real_tag
    p0 = 2.0 ** -t_bits
    sigma = _sigma(p0, guesses)
    return {"kind": "tag-guess", "z_bits": z_bits, "t_bits": t_bits, "guesses": guesses,
            "accepted": int(accepted), "rate": accepted / guesses if guesses else 0.0,
            "expected": p0, "threshold": p0 + 3 * sigma}


def _key(family: Su2FamilySpec, rng):
    return family.key_from_bits(BitString.random(family.key_bits, rng))


# Family verifiers ----------------------------------------------------------
def _log2_exact(value: int, what: str) -> int:
    if value < 1 or value & (value - 1):
        raise ValueError(f"{what} must be a power of two")
    return value.bit_length() - 1


def _su2_family(n_z: int, n_t: int) -> HashFamily:
    return HashFamily.su2(_log2_exact(n_z, "|Z|"), _log2_exact(n_t, "|T|"))


def _non_au2(n_m: int, n_z: int) -> HashFamily:
    # Every member sends inputs 0 and 1 to the same digest.
    full = HashFamily.all_functions(n_m, n_z)
    keep = full.table[full.table[:, 0] == full.table[:, 1]]
    return HashFamily(keep, n_z, f"glued[{n_m}->{n_z}]")


def verify_cmd(selector: str, m: int = 4, z: int = 2, t: int = 2, epsilon=None) -> dict:
    """Exhaustive check of one family, rendered as a dict.

    Parameters
    ----------
    selector : {"composed", "non-au2", "all-functions", "constant", "su2"}
        ``composed``: all functions ``M -> Z`` composed with the SU2 family
        ``Z -> T``, checked against the composition theorem.
        ``non-au2``: the same with an inner family whose members all glue
        two inputs together.
        ``all-functions``: every function ``M -> Z`` claimed AU2.
        ``constant``: the SU2 family ``Z -> T`` plus one constant member,
        claimed SU2.
        ``su2``: the SU2 family ``Z -> T`` claimed SU2.
    m, z, t : int
        Sizes of the message, digest and tag sets.
    epsilon : Fraction or str, optional
        Claimed constant; ``1/|Z|`` for AU2 claims, ``1/|T|`` otherwise.
    """
    if selector in ("composed", "non-au2"):
        inner = HashFamily.all_functions(m, z) if selector == "composed" else _non_au2(m, z)
        rep = verify_composition_theorem(inner, _su2_family(z, t))
        return to_json({
            "selector": selector, "sizes": list(rep.sizes),
            "epsilon_prime": rep.epsilon_prime_f, "epsilon_g": rep.epsilon_g,
            "formula_epsilon": rep.formula_epsilon, "identity_holds": rep.identity_holds,
            "iff_holds": rep.iff_holds,
            "g_meets_formula_at_1_over_z": rep.epsilon_g <= (
                Fraction(1, z) * (1 - Fraction(1, t)) + Fraction(1, t)),
        })
    if selector == "all-functions":
        fam = HashFamily.all_functions(m, z)
        claim, kind = Fraction(epsilon if epsilon is not None else Fraction(1, z)), "AU2"
    elif selector in ("su2", "constant"):
        fam = _su2_family(z, t)
        if selector == "constant":
            row = np.zeros((1, fam.n_inputs), dtype=np.int64)
            fam = HashFamily(np.vstack([fam.table, row]), fam.n_outputs, fam.name + "+const")
        claim, kind = Fraction(epsilon if epsilon is not None else Fraction(1, t)), "SU2"
    else:
        raise ValueError(f"unknown family selector {selector!r}")
    v = verify_family(fam, kind, claim)
    return to_json({
        "selector": selector, "family": fam.name, "kind": v.kind, "claimed_epsilon": claim,
        "measured_epsilon": v.measured_epsilon, "condition_a": v.condition_a,
        "verdict": v.verdict, "witness": list(v.worst_pair),
    })
