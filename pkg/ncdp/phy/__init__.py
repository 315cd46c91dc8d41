from ncdp.phy.waveform import (
    Burst,
    ChannelParams,
    CollisionSlot,
    PulseShape,
    SampleSet,
    SamplingModel,
    SamplingStrategy,
    channel_matrix,
    equivalent_channel,
    matched_filter,
    matched_filter_and_sample,
    noise_variance,
    noise_variance_from_ebn0,
    raised_cosine,
    sample_offsets,
    sampling_model,
    srrc,
    srrc_pulse,
    srrc_taps,
    synthesize_collision,
)
from ncdp.phy.preamble import PreambleBank
from ncdp.phy.xorllr import HypothesisSet, llr_multi_sample, llr_xor, llr_xor_bruteforce
from ncdp.phy.estimation import (
    ChannelEstimate,
    EmConfig,
    UserChannelEstimate,
    combine_estimates,
    correlate_preambles,
    em_estimate,
    identify_nodes,
    mstep_fit,
)

__all__ = [
    "Burst", "ChannelParams", "CollisionSlot", "PulseShape", "SampleSet", "SamplingModel",
    "SamplingStrategy",
    "channel_matrix", "equivalent_channel", "matched_filter",
    "matched_filter_and_sample", "noise_variance", "noise_variance_from_ebn0", "raised_cosine",
    "sample_offsets", "sampling_model", "srrc", "srrc_pulse", "srrc_taps", "synthesize_collision",
    "PreambleBank", "HypothesisSet", "llr_multi_sample", "llr_xor", "llr_xor_bruteforce",
    "ChannelEstimate", "EmConfig", "UserChannelEstimate", "combine_estimates",
    "correlate_preambles", "em_estimate", "identify_nodes", "mstep_fit",
]
