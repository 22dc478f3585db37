import pytest

from qkd_twostep.adversary import (
    MATRIX,
    STRATEGIES,
    AttackOptions,
    execute_attack,
    get_strategy,
    matrix_cell,
)
from qkd_twostep.harness import build_scheme
from qkd_twostep.protocol import SessionParams, run_protocol

N = 1024
DETERMINISTIC = [(name, v) for name, cls in sorted(STRATEGIES.items())
                 for v in cls.variants if v in cls.expected and name != "otpec-guess"]


@pytest.mark.parametrize("name,variant", DETERMINISTIC)
@pytest.mark.parametrize("auth", ["twostep", "salt", "nonce-a", "nonce-b"])
def test_expected_cell(name, variant, auth):
    strategy = get_strategy(name)
    hits = 0
    for seed in range(3):
        out = execute_attack(strategy, variant, build_scheme(auth, 12, 16, N),
                             SessionParams(N), rng=seed)
        hits += (out.correlation_case, out.final_relation) == strategy.expected[variant]
    assert hits >= 2


@pytest.mark.parametrize("name,variant", DETERMINISTIC)
@pytest.mark.parametrize("auth", ["fixed-secret", "fresh-secret", "its"])
def test_secret_digest_stops_attack(name, variant, auth):
    out = execute_attack(name, variant, build_scheme(auth, 12, 16, N), SessionParams(N), rng=0)
    assert out.abort_by is not None
    assert "tag" in out.abort_by
    assert not out.keys_agree


@pytest.mark.parametrize("variant", sorted(STRATEGIES["tamper"].variants))
def test_tamper_aborts(variant):
    for index in range(3):
        out = execute_attack(get_strategy("tamper", AttackOptions(tamper_index=index)),
                             variant, build_scheme("twostep", 12, 16, N), SessionParams(N), rng=1)
        assert out.abort_by is not None


@pytest.mark.parametrize("variant", ["P1", "P3"])
def test_straightforward_mitm_aborts(variant):
    out = execute_attack("straightforward-mitm", variant, build_scheme("twostep", 12, 16, N),
                         SessionParams(N), rng=2)
    assert out.abort_by is not None


def test_forged_events_marked():
    out = execute_attack("p1-interleave-qm", "P1", build_scheme("twostep", 12, 16, N),
                         SessionParams(N), rng=3)
    forged = [e.kind for e in out.events if e.forged]
    assert forged
    assert all(f["found"] for f in out.eve.forges)


def test_strategy_rejects_other_variant():
    with pytest.raises(ValueError):
        execute_attack("p1-interleave-qm", "P3", build_scheme("twostep", 12, 16, N),
                       SessionParams(N), rng=0)


def test_unknown_strategy():
    with pytest.raises(ValueError):
        get_strategy("quantum-magic")


@pytest.mark.parametrize("cell", sorted(MATRIX))
def test_matrix_cells(cell):
    strategy, variant = matrix_cell(*cell)
    assert variant in strategy.variants
    assert variant in strategy.expected
    assert strategy.quantum_memory == cell[1]


def test_w_max_zero_forges_nothing():
    out = execute_attack(get_strategy("p1-interleave-qm", AttackOptions(w_max=0)), "P1",
                         build_scheme("twostep", 12, 16, N), SessionParams(N), rng=4)
    # a weight-0 hit needs the digest to match outright
    assert out.abort_by is not None or all(f["weight"] == 0 for f in out.eve.forges)


def test_intercept_resend_disagreement():
    rates = []
    for seed in range(5):
        out = execute_attack("p3-intercept-resend", "P3", build_scheme("twostep", 12, 16, 4096),
                             SessionParams(4096), rng=seed)
        rates.append(out.raw_ab_disagreement)
    assert 0.2 < sum(rates) / len(rates) < 0.3


def test_eve_keys_match_parties():
    out = execute_attack("b-delayed-intercept", "P3D", build_scheme("twostep", 12, 16, N),
                         SessionParams(N), rng=6)
    assert out.final_relation == "KA!=KE=KB"
    assert out.eve.key_b == out.key_b
    assert out.key_a != out.key_b


def test_same_seed_same_attack():
    scheme = build_scheme("twostep", 12, 16, N)
    a = run_protocol("P2", scheme, SessionParams(N), adversary=get_strategy("p2-onesided-qm"),
                     rng=9)
    b = run_protocol("P2", scheme, SessionParams(N), adversary=get_strategy("p2-onesided-qm"),
                     rng=9)
    assert a.summary() == b.summary()
