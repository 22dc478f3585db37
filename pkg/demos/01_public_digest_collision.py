"""Why a public first step breaks a secret second step.

The tag is ``h_K(f(m))`` with ``f`` public.  Whoever sees one tagged
message can search for another message with the same digest and reuse
the tag, without ever learning ``K``.
"""

import numpy as np

from qkd_twostep import BitString
from qkd_twostep.adversary import MutationSpace, find_colliding_message
from qkd_twostep.hashing import AuthScheme, Su2Key, tag_digest, two_step_tag, verify_tag
from qkd_twostep.protocol.wire import MsgType, WireMessage

rng = np.random.default_rng(1)
scheme = AuthScheme.two_step(12, 16)
family = scheme.su2
key = Su2Key(family, int(rng.integers(1 << family.field_bits)), int(rng.integers(1 << family.t_bits)))

sent = WireMessage(1, MsgType.S3, (BitString.random(64, rng),))
tag = two_step_tag(scheme, key, sent.frame_bits())
print(f"Alice sends 64 basis bits with tag {tag.to_str()}")

wanted = WireMessage(1, MsgType.S3, (BitString.random(64, rng),))
print(f"Eve would rather send bases differing in {wanted.fields[0].hamming(sent.fields[0])} places")

space = MutationSpace(wanted, 0, tuple(range(64)), w_max=3)
res = find_colliding_message(space, tag_digest(scheme, sent.frame_bits()), scheme.public_hash)
print(f"searched {res.candidates_tested} candidates, flipped {res.weight_used} bits")

ok = verify_tag(scheme, key, res.message.frame_bits(), tag)
print(f"Bob accepts the forged message with Alice's tag: {ok}")
