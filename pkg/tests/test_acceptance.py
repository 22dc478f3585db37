"""Acceptance criteria at their stated tolerances.

Each test prints one ``PASS`` or ``FAIL`` line, then asserts.
"""

import itertools
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from qkd_twostep.adversary import MATRIX, STRATEGIES
from qkd_twostep.adversary.subsequence import subsequence_probability
from qkd_twostep.harness import ExperimentConfig, run_sweep
from qkd_twostep.harness.calculators import (
    key_consumption_table,
    lemma1_monte_carlo,
    lemma2_monte_carlo,
    subsequence_brute_force,
    tag_guess_trials,
    verify_cmd,
)
from qkd_twostep.protocol import VARIANTS, SessionParams, run_protocol
from qkd_twostep.hashing import AuthScheme

pytestmark = pytest.mark.slow

FULL_SCALE = dict(z_bits=12, t_bits=16, n=4096, trials=200, seed=2024)


@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail
    return emit


def sweep(**kw):
    return run_sweep(ExperimentConfig(**{**FULL_SCALE, **kw}))


def test_c01_lemma1_forge_frequency(report):
    start = time.perf_counter()
    res = lemma1_monte_carlo(ell=64, w=3, z_bits=12, t_bits=16, trials=1000, seed=1)
    elapsed = time.perf_counter() - start
    sigma = math.sqrt(res["bound_full"] * (1 - res["bound_full"]) / 1000)
    ok = res["rate"] >= res["bound_full"] - 3 * sigma and elapsed < 60
    report(1, ok, f"rate {res['rate']:.4f} vs bound {res['bound_full']:.6f} - 3 sigma, "
                  f"{elapsed:.1f} s")


def test_c02_subsequence_exact(report):
    ok = subsequence_probability(2, 4) == Fraction(11, 16)
    checked = 0
    for n in range(1, 13):
        for m in range(1, n + 1):
            exact = subsequence_probability(m, n)
            for s in itertools.product((0, 1), repeat=m):
                ok &= subsequence_brute_force(s, n) == exact
                checked += 1
    report(2, ok, f"11/16 exact and {checked} (pattern, n) pairs with n <= 12 match")


def test_c03_lemma2_crafting(report):
    start = time.perf_counter()
    res = lemma2_monte_carlo(n=1024, k=64, trials=10_000, seed=3)
    elapsed = time.perf_counter() - start
    bound = 1 - math.exp(-8)
    sigma = math.sqrt(bound * (1 - bound) / 10_000)
    ok = res["rate"] >= bound - 3 * sigma and elapsed < 120
    report(3, ok, f"rate {res['rate']:.4f} vs {bound - 3 * sigma:.4f}, {elapsed:.1f} s")


def test_c04_p1_interleave(report):
    res = sweep(protocol="1", attack="p1-interleave-qm")
    s = res.summary
    three_way = s["final_relations"].get("KA=KE=KB", 0) / s["trials"]
    tag_aborts = sum(1 for r in res.records if r["success"] and r["outcome"]["abort_by"])
    ok = three_way >= 0.95 and tag_aborts == 0
    report(4, ok, f"three-way {three_way:.3f}, tag aborts among successes {tag_aborts}")


def test_c05_p3_intercept_resend(report):
    s = sweep(protocol="3", attack="p3-intercept-resend").summary
    three_way = s["final_relations"].get("KA=KE=KB", 0) / s["trials"]
    dis = s["mean_raw_disagreement"]
    ok = abs(dis - 0.25) <= 0.02 and three_way >= 0.9
    report(5, ok, f"sifted disagreement {dis:.4f}, three-way {three_way:.3f}")


def test_c06_p2_attacks(report):
    rates = {}
    for attack in ("p2-onesided-qm", "p2-bidirectional-qm"):
        s = sweep(protocol="2", attack=attack).summary
        good = sum(s["final_relations"].get(k, 0) for k in ("KA=KE=KB", "separate-worlds"))
        rates[attack] = good / s["trials"]
    ok = all(r >= 0.9 for r in rates.values())
    report(6, ok, ", ".join(f"{k} {v:.3f}" for k, v in rates.items()))


def test_c07_attack_matrix(report):
    cells = []
    for key, (attack, variant) in sorted(MATRIX.items()):
        protocol = variant[1:]
        res = sweep(protocol=protocol, attack=attack, n=2048, trials=100)
        case_ok = np.mean([r["outcome"]["correlation_case"] == r["expected_case"]
                           for r in res.records])
        rel_ok = np.mean([r["outcome"]["final_relation"] == r["expected_relation"]
                          for r in res.records])
        cells.append((attack, variant, case_ok, rel_ok))
    ok = all(c >= 0.9 and r >= 0.9 for _, _, c, r in cells)
    worst = min(min(c, r) for _, _, c, r in cells)
    report(7, ok, f"{len(cells)} cells, worst case/relation match rate {worst:.2f}")


def test_c08_negative_controls(report):
    guess = tag_guess_trials(z_bits=12, t_bits=16, guesses=100_000, seed=8)
    ok_a = guess["rate"] <= guess["threshold"]

    trials = 100
    p = 2 / 2 ** 16
    limit = p + 3 * math.sqrt(p * (1 - p) / trials)
    worst = 0.0
    for name, cls in sorted(STRATEGIES.items()):
        for variant in cls.variants:
            protocol = variant[1:]
            s = sweep(protocol=protocol, auth="its", attack=name, n=1024, trials=trials).summary
            worst = max(worst, 1 - s["aborts"] / s["trials"])
    ok_b = worst <= limit

    scheme = AuthScheme.two_step(12, 16)
    disagreements = 0
    for variant in sorted(VARIANTS):
        for i in range(1000):
            out = run_protocol(variant, scheme, SessionParams(1024), rng=i)
            disagreements += not out.keys_agree
    ok_c = disagreements == 0
    report(8, ok_a and ok_b and ok_c,
           f"(a) tag guesses accepted {guess['rate']:.2e} <= {guess['threshold']:.2e}; "
           f"(b) worst ITS acceptance {worst:.3f} <= {limit:.2e}; "
           f"(c) honest disagreements {disagreements}/{1000 * len(VARIANTS)}")


def test_c09_composition_theorem(report):
    triples = [(4, 2, 2), (3, 2, 4), (4, 4, 2), (2, 4, 4)]
    ok = True
    for m, z, t in triples:
        res = verify_cmd("composed", m, z, t)
        ok &= res["identity_holds"] and res["iff_holds"]
    bad = verify_cmd("non-au2", 4, 2, 2)
    ok &= bad["iff_holds"] and not bad["g_meets_formula_at_1_over_z"]
    report(9, ok, f"identity and iff hold for {triples}; non-AU2 witness "
                  f"epsilon_G = {bad['epsilon_g']}")


def test_c10_key_consumption(report):
    tab = key_consumption_table(256, 64)
    got = [tab["sizes"][k]["key_bits"]
           for k in ("terabit", "petabit", "exabit", "zettabit", "yottabit")]
    ok = tab["its_bits"] == 576 and got == [260, 280, 298, 318, 338]
    report(10, ok, f"its {tab['its_bits']}, sizes {got}")


def test_c11_reproducible(report, tmp_path):
    config = ExperimentConfig(**{**FULL_SCALE, "protocol": "1", "attack": "p1-interleave-qm"})
    first = run_sweep(config).to_jsonl()
    second = run_sweep(config).to_jsonl()
    report(11, first == second, f"{len(first)} bytes, identical on rerun")
