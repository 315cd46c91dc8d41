from ncdp.mac.config import CoefficientPolicy, Decoder, Feedback, ProtocolConfig, TrafficModel
from ncdp.mac.engine import FrameOutcome, allocate_preambles, simulate
from ncdp.mac.frame import ActiveTerminal, FrameState, decode_frame
from ncdp.mac.link import LinkConfig, SlotLink, Transmission
from ncdp.mac.metrics import Metrics
from ncdp.mac.pattern import generate_pattern, replica_pattern, terminal_seeds
from ncdp.mac.schemes import (
    CrdsaScheme,
    NcdpScheme,
    SlottedAlohaScheme,
    crdsa_peel,
    simulate_crdsa,
    simulate_ncdp,
    simulate_sa,
)

__all__ = [
    "CoefficientPolicy", "Decoder", "Feedback", "ProtocolConfig", "TrafficModel",
    "FrameOutcome", "allocate_preambles", "simulate",
    "ActiveTerminal", "FrameState", "decode_frame",
    "LinkConfig", "SlotLink", "Transmission", "Metrics",
    "generate_pattern", "replica_pattern", "terminal_seeds",
    "CrdsaScheme", "NcdpScheme", "SlottedAlohaScheme", "crdsa_peel",
    "simulate_crdsa", "simulate_ncdp", "simulate_sa",
]
