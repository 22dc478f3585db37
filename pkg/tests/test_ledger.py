import pytest

from qkd_twostep import BitString
from qkd_twostep.hashing import AuthScheme
from qkd_twostep.protocol import KeyLedger, LedgerExhausted


def test_draws_in_order(rng):
    pool = BitString.random(100, rng)
    ledger = KeyLedger(pool)
    a = ledger.draw(30, "x")
    b = ledger.draw(70, "y")
    assert a + b == pool
    assert ledger.remaining == 0
    assert ledger.consumed == {"x": 30, "y": 70}


def test_exhaustion_leaves_cursor(rng):
    ledger = KeyLedger(BitString.random(10, rng))
    ledger.draw(4)
    with pytest.raises(LedgerExhausted):
        ledger.draw(7)
    assert ledger.cursor == 4
    with pytest.raises(ValueError):
        ledger.draw(-1)


def test_two_ledgers_agree(rng):
    pool = BitString.random(500, rng)
    scheme = AuthScheme.fresh_secret(12, 16)
    k1 = KeyLedger(pool).draw_tag_key(scheme)
    k2 = KeyLedger(pool).draw_tag_key(scheme)
    assert k1 == k2
    assert len(k1.secret) == scheme.secret_bits


def test_fixed_secret_passed_through(rng):
    scheme = AuthScheme.fixed_secret(12, 16)
    secret = BitString.random(64, rng)
    ledger = KeyLedger(BitString.random(64, rng))
    key = ledger.draw_tag_key(scheme, session_secret=secret)
    assert key.secret == secret
    assert ledger.cursor == scheme.su2.key_bits
