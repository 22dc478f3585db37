"""Every cell of the attack matrix, twenty sessions each.

Rows: who sends bases first, whether Eve has quantum memory.
Columns: tags checked per message or once at the end.
"""

from collections import Counter

from qkd_twostep.adversary import MATRIX, get_strategy
from qkd_twostep.hashing import AuthScheme
from qkd_twostep.protocol import SessionParams, run_protocol

scheme = AuthScheme.two_step(12, 16)
params = SessionParams(2048)

print(f"{'sender':6s} {'memory':6s} {'delayed':7s} {'strategy':22s} {'variant':7s} outcomes")
for (sender, memory, delayed), (name, variant) in sorted(MATRIX.items()):
    strategy = get_strategy(name)
    seen = Counter()
    for seed in range(20):
        out = run_protocol(variant, scheme, params, adversary=strategy, rng=seed)
        seen[(out.correlation_case, out.final_relation)] += 1
    summary = ", ".join(f"case {c} {r} x{k}" for (c, r), k in seen.most_common())
    print(f"{sender:6s} {str(memory):6s} {str(delayed):7s} {name:22s} {variant:7s} {summary}")
