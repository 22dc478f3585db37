"""Protocol 1 under the interleaving attack with quantum memory.

Eve stores Alice's photons, forges the basis messages so that both
honest parties end up with a key she can compute, and relays the rest.
"""

import numpy as np

from qkd_twostep.adversary import execute_attack
from qkd_twostep.hashing import AuthScheme
from qkd_twostep.protocol import SessionParams

out = execute_attack("p1-interleave-qm", "P1", AuthScheme.two_step(12, 16),
                     SessionParams(4096), rng=np.random.default_rng(7))

for event in out.events:
    mark = "forged" if event.forged else ""
    print(f"{event.direction:5s} {event.kind:14s} {mark}")

print()
print(f"abort:             {out.abort_by}")
print(f"observed QBER:     {out.qber_observed:.3f}")
print(f"final key bits:    {len(out.key_a)}")
print(f"correlation case:  {out.correlation_case}")
print(f"final relation:    {out.final_relation}")
print(f"Eve holds Bob's key: {out.eve.key_b == out.key_b}")
