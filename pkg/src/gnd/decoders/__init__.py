from .base import DecodeResult, Decoder
from .bposd import (
    BpOsdDecoder,
    ContractViolation,
    InconsistentSyndrome,
    bp_min_sum,
    decoder_logical_projection,
    osd_postprocess,
)
from .mld import BudgetExceeded, ExactMldDecoder, coset_log_probs, exact_mld_decode, exact_mld_ler
from .neural import GndDecoder, MndDecoder, gnd_decode, matched_mnd_config, mnd_decode, mnd_train

__all__ = [
    "BpOsdDecoder",
    "BudgetExceeded",
    "ContractViolation",
    "DecodeResult",
    "Decoder",
    "ExactMldDecoder",
    "GndDecoder",
    "InconsistentSyndrome",
    "MndDecoder",
    "bp_min_sum",
    "coset_log_probs",
    "decoder_logical_projection",
    "exact_mld_decode",
    "exact_mld_ler",
    "gnd_decode",
    "matched_mnd_config",
    "mnd_decode",
    "mnd_train",
    "osd_postprocess",
]
