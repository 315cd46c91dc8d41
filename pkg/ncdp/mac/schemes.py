"""
NCDP, CRDSA and slotted ALOHA on top of the frame engine.
"""

import logging
from typing import Optional, Tuple

import numpy as np

from ncdp.exceptions import ParameterError
from ncdp.mac.config import CoefficientPolicy, Feedback, ProtocolConfig, TrafficModel
from ncdp.mac.engine import FrameOutcome, simulate
from ncdp.mac.frame import ActiveTerminal, FrameState, decode_frame
from ncdp.mac.link import SlotLink
from ncdp.mac.metrics import Metrics
from ncdp.mac.pattern import generate_pattern, replica_pattern, terminal_seeds

logger = logging.getLogger(__name__)


def crdsa_peel(pattern: np.ndarray, max_iterations: int) -> Tuple[np.ndarray, int]:
    """
    Iterative interference cancellation on a boolean S x N_tx pattern.

    Each round decodes every burst alone in its slot and cancels all of
    its replicas. Returns the recovered mask and the rounds used.
    """
    remaining = np.array(pattern, dtype=bool, copy=True)
    recovered = np.zeros(remaining.shape[1], dtype=bool)
    rounds = 0
    while rounds < max_iterations:
        clean = remaining.sum(axis=1) == 1
        if not clean.any():
            break
        rounds += 1
        decoded = np.unique(remaining[clean].argmax(axis=1))
        recovered[decoded] = True
        remaining[:, decoded] = False
    return recovered, rounds


class NcdpScheme:
    """Random GF(2^n) precoding with matrix decoding at the receiver."""
    name = "ncdp"

    def __init__(self, cfg: ProtocolConfig, link: Optional[SlotLink] = None) -> None:
        if not cfg.ideal_phy and link is None:
            raise ParameterError("full-PHY simulation needs a slot link")
        self.cfg = cfg
        self.link = link

    def run_frame(self, preambles: np.ndarray, frame_key: int, rng: np.random.Generator) -> FrameOutcome:
        pattern = generate_pattern(terminal_seeds(preambles, frame_key), self.cfg)
        active = tuple(ActiveTerminal(i, int(mu)) for i, mu in enumerate(preambles))
        sent = np.count_nonzero(pattern.entries, axis=0)

        if self.cfg.ideal_phy:
            frame = FrameState.ideal(active, pattern)
            recovered, _ = decode_frame(frame, self.cfg)
            mask = np.zeros(pattern.cols, dtype=bool)
            mask[list(recovered)] = True
            return FrameOutcome(mask, sent)

        decoded, values, messages = self.link.run_frame(pattern, preambles, rng)
        active = tuple(ActiveTerminal(i, int(mu), messages[i]) for i, mu in enumerate(preambles))
        frame = FrameState(active, pattern, decoded, values)
        recovered, _ = decode_frame(frame, self.cfg)
        mask = np.zeros(pattern.cols, dtype=bool)
        for i, message in recovered.items():
            if np.array_equal(message, messages[i]):
                mask[i] = True
            else:
                logger.debug("terminal %d recovered with errors", i)
        return FrameOutcome(mask, sent)


class CrdsaScheme:
    """d replicas per message, iterative interference cancellation."""
    name = "crdsa"

    def __init__(self, cfg: ProtocolConfig) -> None:
        if cfg.d is None or cfg.d < 2:
            raise ParameterError("CRDSA needs at least two replicas")
        self.cfg = cfg

    def run_frame(self, preambles: np.ndarray, frame_key: int, rng: np.random.Generator) -> FrameOutcome:
        pattern = replica_pattern(terminal_seeds(preambles, frame_key), self.cfg.slots, self.cfg.d)
        recovered, _ = crdsa_peel(pattern, self.cfg.max_iterations)
        return FrameOutcome(recovered, pattern.sum(axis=0))


class SlottedAlohaScheme:
    """One burst per message; success iff it is alone in its slot."""
    name = "sa"

    def __init__(self, slots: int) -> None:
        self.slots = slots

    def run_frame(self, preambles: np.ndarray, frame_key: int, rng: np.random.Generator) -> FrameOutcome:
        pattern = replica_pattern(terminal_seeds(preambles, frame_key), self.slots, 1)
        alone = pattern.sum(axis=1) == 1
        recovered = (pattern & alone[:, None]).any(axis=0)
        return FrameOutcome(recovered, pattern.sum(axis=0))


def simulate_ncdp(
    cfg: ProtocolConfig,
    traffic: TrafficModel,
    frames: int,
    rng: np.random.Generator,
    link: Optional[SlotLink] = None,
    traffic_rng: Optional[np.random.Generator] = None,
) -> Metrics:
    return simulate(NcdpScheme(cfg, link), cfg, traffic, frames, rng, traffic_rng)


def simulate_crdsa(
    cfg: ProtocolConfig,
    traffic: TrafficModel,
    frames: int,
    rng: np.random.Generator,
    traffic_rng: Optional[np.random.Generator] = None,
) -> Metrics:
    return simulate(CrdsaScheme(cfg), cfg, traffic, frames, rng, traffic_rng)


def simulate_sa(
    traffic: TrafficModel,
    slots: int,
    frames: int,
    rng: np.random.Generator,
    feedback: Feedback = Feedback.NONE,
    backlog: int = 50,
    traffic_rng: Optional[np.random.Generator] = None,
    preamble_collisions: bool = False,
    preamble_limit: bool = True,
) -> Metrics:
    cfg = ProtocolConfig(
        slots=slots,
        policy=CoefficientPolicy.FIXED_REPLICAS,
        d=1,
        feedback=feedback,
        backlog=backlog,
        preamble_collisions=preamble_collisions,
        preamble_limit=preamble_limit,
    )
    return simulate(SlottedAlohaScheme(slots), cfg, traffic, frames, rng, traffic_rng)
