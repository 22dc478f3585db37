"""BB84 post-processing protocols as message-passing state machines."""

from .ledger import KeyLedger, LedgerExhausted
from .parties import Alice, Bob, PartyResult, SessionParams, derived_pa_seed
from .reconcile import (
    CO_BITS,
    CO_EPSILON,
    ConfirmSpec,
    EcCode,
    PaSpec,
    apply_mask,
    binary_entropy,
    confirm,
    decode_error_rate,
    ec_codes,
    ec_correct,
    ec_syndrome,
    encode_error_rate,
    pa_apply,
    pa_margin,
    pa_output_length,
    select_code,
    sift_mask,
)
from .session import (
    AttackContext,
    Endpoint,
    EveReport,
    SessionOutcome,
    TraceEvent,
    correlation_case,
    final_relation,
    relation,
    relay,
    required_pool_bits,
    run_protocol,
)
from .variants import CLI_NAMES, VARIANTS, Variant, get_variant
from .wire import HEADER_BITS, FrameError, MsgType, WireMessage, decode_frame

__all__ = [
    "Alice", "AttackContext", "Bob", "CLI_NAMES", "CO_BITS", "CO_EPSILON", "ConfirmSpec",
    "EcCode", "Endpoint", "EveReport", "FrameError", "HEADER_BITS", "KeyLedger",
    "LedgerExhausted", "MsgType", "PaSpec", "PartyResult", "SessionOutcome",
    "SessionParams", "TraceEvent", "VARIANTS", "Variant", "WireMessage", "apply_mask",
    "binary_entropy", "confirm", "correlation_case", "decode_error_rate",
    "decode_frame", "derived_pa_seed", "ec_codes", "ec_correct", "ec_syndrome",
    "encode_error_rate", "final_relation", "get_variant", "pa_apply", "pa_margin",
    "pa_output_length", "relation", "relay", "required_pool_bits", "run_protocol",
    "select_code", "sift_mask",
]
