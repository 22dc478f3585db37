"""Attack laboratory for QKD post-processing under two-step authentication.

Subpackages
-----------
hashing
    Public hash, universal families, tag schemes, verifiers and bounds.
protocol
    Alice and Bob as state machines plus the session driver.
adversary
    Collision search, mask crafting and the man-in-the-middle strategies.
harness
    Seeded sweeps, calculators and the command line.
"""

from .bits import BitString

__version__ = "0.1.0"
__all__ = ["BitString", "__version__"]
