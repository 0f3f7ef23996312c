"""Product-code FEC workbench.

Binary BCH component codes, a family of iterative bounded-distance decoders
for two-dimensional product codes (plain, genie-aided, scaled-reliability,
and LUT-combined reliability), density evolution for the matching GLDPC
ensembles, AWGN/BICM channel models with LLR quantization, and a
deterministic Monte Carlo BER harness.
"""

from .bch import BchCode, DecodeOutcome, GaloisField, bch_construct, bdd_decode, extrinsic_bdd_decode
from .channel import (
    ChannelModel,
    LlrQuantizer,
    MixtureLlrModel,
    ebn0_to_sigma,
    exact_llr,
    lloyd_max_design,
    maxlog_llr,
    mixture_model,
    quantize,
    sigma_to_esn0_db,
    transmit,
)
from .de import (
    DeTrajectory,
    OutcomeProbs,
    TransitionTable,
    combining_table,
    de_run,
    de_step,
    estimate_transition_table,
    export_lut,
    outcome_probs,
    threshold_search,
)
from .product import (
    CombiningLut,
    DecodeReport,
    DecoderConfig,
    ProductCode,
    hard_decisions,
    ibdd_cr_decode,
    ibdd_decode,
    ibdd_sr_decode,
    ideal_ibdd_decode,
    pc_encode,
)
from .sim import ConfigError, SimConfig, SimResult, run_ber_sweep, write_csv

__all__ = [
    "BchCode", "DecodeOutcome", "GaloisField", "bch_construct", "bdd_decode",
    "extrinsic_bdd_decode", "ChannelModel", "LlrQuantizer", "MixtureLlrModel",
    "ebn0_to_sigma", "exact_llr", "lloyd_max_design", "maxlog_llr", "mixture_model",
    "quantize", "sigma_to_esn0_db", "transmit", "DeTrajectory", "OutcomeProbs",
    "TransitionTable", "combining_table", "de_run", "de_step",
    "estimate_transition_table", "export_lut", "outcome_probs", "threshold_search",
    "CombiningLut", "DecodeReport", "DecoderConfig", "ProductCode", "hard_decisions",
    "ibdd_cr_decode", "ibdd_decode", "ibdd_sr_decode", "ideal_ibdd_decode", "pc_encode",
    "ConfigError", "SimConfig", "SimResult", "run_ber_sweep", "write_csv",
]
