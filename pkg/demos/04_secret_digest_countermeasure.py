"""The same attacks against tag schemes whose first step is keyed.

A salt or public nonce leaves the digest computable by Eve, so the
collision search still works.  A secret first step (fixed or fresh key,
or the composed ITS construction) leaves nothing to search against.
"""

from qkd_twostep.adversary import get_strategy
from qkd_twostep.harness import build_scheme
from qkd_twostep.protocol import SessionParams, run_protocol

params = SessionParams(1024)
attacks = [("p1-interleave-qm", "P1"), ("p3-intercept-resend", "P3"),
           ("p2-onesided-qm", "P2")]

print(f"{'auth':13s}" + "".join(f"{a:>22s}" for a, _ in attacks))
for auth in ("twostep", "salt", "nonce-a", "fixed-secret", "fresh-secret", "its"):
    scheme = build_scheme(auth, 12, 16, params.n_slots)
    cells = []
    for name, variant in attacks:
        wins = 0
        for seed in range(10):
            out = run_protocol(variant, scheme, params, adversary=get_strategy(name), rng=seed)
            wins += out.abort_by is None
        cells.append(f"{wins}/10 undetected")
    print(f"{auth:13s}" + "".join(f"{c:>22s}" for c in cells))
