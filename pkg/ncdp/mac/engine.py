"""
Frame engine shared by every access scheme.

The engine owns arrivals, preamble allocation, the ARQ backlog and metric
accounting; a scheme only decides which terminals of a frame get through
and how many bursts each one sent.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass
from typing import DefaultDict, List, Optional, Protocol, Tuple

import numpy as np

from ncdp.config import PREAMBLE_LENGTH
from ncdp.exceptions import ParameterError, SimulationError
from ncdp.mac.config import Feedback, ProtocolConfig, TrafficModel
from ncdp.mac.metrics import Metrics

logger = logging.getLogger(__name__)

AVAILABLE_PREAMBLES = PREAMBLE_LENGTH - 1


@dataclass(frozen=True)
class FrameOutcome:
    """Per-terminal result of one frame: recovered flag and bursts sent."""
    recovered: np.ndarray
    transmissions: np.ndarray


class AccessScheme(Protocol):
    name: str

    def run_frame(self, preambles: np.ndarray, frame_key: int, rng: np.random.Generator) -> FrameOutcome:
        ...


def allocate_preambles(
    count: int,
    rng: np.random.Generator,
    collisions: bool = False,
    available: int = AVAILABLE_PREAMBLES,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Preamble index per terminal and a mask of terminals that may transmit.

    Without collisions the indices are distinct and terminals beyond the
    size of the preamble set are left out. With collisions every
    terminal draws independently; terminals sharing an index end up
    with identical access patterns, which no decoder can separate.
    """
    if collisions:
        return rng.integers(1, available + 1, size=count), np.ones(count, dtype=bool)
    usable = min(count, available)
    preambles = np.zeros(count, dtype=np.int64)
    chosen = rng.permutation(count)[:usable] if count > usable else np.arange(count)
    preambles[chosen] = rng.choice(available, size=usable, replace=False) + 1
    mask = np.zeros(count, dtype=bool)
    mask[chosen] = True
    if count > usable:
        logger.debug("%d terminals found no free preamble", count - usable)
    return preambles, mask


def _run_frame(scheme: AccessScheme, cfg: ProtocolConfig, count: int, frame_key: int,
               rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Recovered flags, bursts sent and the preamble mask for ``count`` terminals."""
    available = AVAILABLE_PREAMBLES if cfg.preamble_limit else max(count, AVAILABLE_PREAMBLES)
    preambles, usable = allocate_preambles(count, rng, cfg.preamble_collisions, available)
    recovered = np.zeros(count, dtype=bool)
    transmissions = np.zeros(count, dtype=np.int64)
    if usable.any():
        outcome = scheme.run_frame(preambles[usable], frame_key, rng)
        recovered[usable] = outcome.recovered
        transmissions[usable] = outcome.transmissions
    return recovered, transmissions, usable


def simulate(
    scheme: AccessScheme,
    cfg: ProtocolConfig,
    traffic: TrafficModel,
    frames: int,
    rng: np.random.Generator,
    traffic_rng: Optional[np.random.Generator] = None,
) -> Metrics:
    """
    Run ``frames`` measured frames of ``scheme``.

    Arrivals come from ``traffic_rng`` (default: ``rng``) so that schemes
    compared on the same seed see the same arrival process.
    """
    if frames < 1:
        raise ParameterError(f"frames must be >= 1, got {frames}")
    traffic_rng = traffic_rng if traffic_rng is not None else rng
    if cfg.feedback is Feedback.NONE:
        return _simulate_no_feedback(scheme, cfg, traffic, frames, rng, traffic_rng)
    return _simulate_arq(scheme, cfg, traffic, frames, rng, traffic_rng)


def _simulate_no_feedback(scheme, cfg, traffic, frames, rng, traffic_rng) -> Metrics:
    arrivals = np.zeros(frames, dtype=np.int64)
    delivered = np.zeros(frames, dtype=np.int64)
    transmissions = np.zeros(frames, dtype=np.int64)
    for f in range(frames):
        count = traffic.arrivals(traffic_rng, cfg.slots)
        recovered, sent, _ = _run_frame(scheme, cfg, count, f, rng)
        arrivals[f] = count
        delivered[f] = int(recovered.sum())
        transmissions[f] = int(sent.sum())
    metrics = Metrics.no_feedback(traffic.load, cfg.slots, arrivals, delivered, transmissions)
    logger.debug("%s G=%.3f: %s", scheme.name, traffic.load, metrics)
    return metrics


def _simulate_arq(scheme, cfg, traffic, frames, rng, traffic_rng) -> Metrics:
    """
    Unrecovered messages are re-sent in a frame drawn uniformly among the
    next B frames. Each pending entry carries the bursts it has sent so far.
    Terminals left without a preamble never transmit and are dropped as lost.
    """
    warmup = cfg.warmup
    total_frames = warmup + frames
    schedule: DefaultDict[int, List[np.ndarray]] = defaultdict(list)
    delivered_window = np.zeros(frames, dtype=np.int64)
    tx_window = np.zeros(frames, dtype=np.int64)
    totals = {"arrivals": 0, "delivered": 0, "lost": 0, "backlog": 0}

    for f in range(total_frames):
        new = traffic.arrivals(traffic_rng, cfg.slots)
        carried = schedule.pop(f, [])
        history = np.concatenate([np.zeros(new, dtype=np.int64), *carried]) if carried else np.zeros(new, dtype=np.int64)
        totals["arrivals"] += new

        recovered, sent, usable = _run_frame(scheme, cfg, history.size, f, rng)
        history = history + sent
        done = int(recovered.sum())
        totals["delivered"] += done
        totals["lost"] += int((~usable).sum())
        if f >= warmup:
            delivered_window[f - warmup] = done
            tx_window[f - warmup] = int(history[recovered].sum())

        pending = history[usable & ~recovered]
        if pending.size:
            delays = rng.integers(1, cfg.backlog + 1, size=pending.size)
            for delay in np.unique(delays):
                schedule[f + int(delay)].append(pending[delays == delay])

    totals["backlog"] = int(sum(chunk.size for chunks in schedule.values() for chunk in chunks))
    if totals["arrivals"] != totals["delivered"] + totals["lost"] + totals["backlog"]:
        raise SimulationError(f"message accounting broke: {totals}")
    metrics = Metrics.with_feedback(traffic.load, cfg.slots, delivered_window, tx_window, totals, total_frames)
    logger.debug("%s G=%.3f ARQ: %s", scheme.name, traffic.load, metrics)
    return metrics
