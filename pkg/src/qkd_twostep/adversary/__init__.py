"""Eve: collision search, subsequence crafting and the attack strategies."""

from .forge import ForgeResult, MutationSpace, find_colliding_message
from .strategies import (
    MATRIX,
    STRATEGIES,
    AttackOptions,
    Halt,
    Strategy,
    execute_attack,
    get_strategy,
    matrix_cell,
)
from .subsequence import (
    CraftError,
    CraftResult,
    craft_bases_mask,
    craft_paced_mask,
    find_subsequence,
    subsequence_probability,
)
from .toolkit import check_preimage, pa_preimage_seed, recover_key

__all__ = [
    "AttackOptions", "CraftError", "CraftResult", "ForgeResult", "Halt", "MATRIX",
    "MutationSpace", "STRATEGIES", "Strategy", "check_preimage", "craft_bases_mask",
    "craft_paced_mask", "execute_attack", "find_colliding_message", "find_subsequence",
    "get_strategy", "matrix_cell", "pa_preimage_seed", "recover_key",
    "subsequence_probability",
]
