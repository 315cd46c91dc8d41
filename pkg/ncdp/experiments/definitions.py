"""
Named experiments.

Each planner turns an ExperimentConfig into SweepPoints. Point tasks are
module-level functions so that they can be shipped to worker processes.
Random streams are keyed by (master_seed, sweep index, stream or trial),
so every series of an experiment sees the same arrivals and channel
draws at a given x.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from ncdp import analytic
from ncdp.exceptions import ConfigError, ParameterError
from ncdp.experiments.models import ExperimentConfig, Measurement, ResultRow
from ncdp.experiments.registry import experiment
from ncdp.galois import FieldSpec
from ncdp.mac import (
    CoefficientPolicy,
    Decoder,
    Feedback,
    LinkConfig,
    ProtocolConfig,
    SlotLink,
    TrafficModel,
    simulate_crdsa,
    simulate_ncdp,
    simulate_sa,
)
from ncdp.phy.estimation import (
    EmConfig,
    amplitude_mse,
    combine_estimates,
    em_estimate,
    frequency_mse,
    phase_mse,
)
from ncdp.phy.preamble import PreambleBank
from ncdp.phy.waveform import Burst, ChannelParams, PulseShape, SamplingStrategy, noise_variance, synthesize_collision
from ncdp.runtime import SweepPoint
from ncdp.utils.rng import trial_rng

logger = logging.getLogger(__name__)

DEFAULT_LOADS = tuple(round(0.1 * i, 1) for i in range(1, 13))
THROUGHPUT_FRAMES = 200
ARQ_FRAMES = 300
FER_TRIALS = 2000
ESTIMATION_TRIALS = 500
SCHEME_KINDS = ("ncdp", "crdsa", "sa")


@dataclass(frozen=True)
class SchemeSpec:
    """A parsed ``kind[:key=value]`` scheme entry."""
    label: str
    kind: str
    protocol: ProtocolConfig


def parse_scheme(text: str, config: ExperimentConfig, feedback: Feedback) -> SchemeSpec:
    """
    ``ncdp`` (uniform coefficients unless p or d is set globally),
    ``ncdp:p=0.0453``, ``ncdp:d=3``, ``ncdp:uniform``, ``crdsa:d=3``, ``sa``.
    """
    kind, _, option = text.partition(":")
    kind = kind.strip().lower()
    if kind not in SCHEME_KINDS:
        raise ConfigError(f"unknown scheme '{kind}'", field="schemes")

    p, d = config.p, config.d
    policy = CoefficientPolicy.UNIFORM
    if option:
        key, _, value = option.partition("=")
        key = key.strip()
        try:
            if key == "p":
                p, d = float(value), None
            elif key == "d":
                p, d = None, int(value)
            elif key == "uniform" and not value:
                p, d = None, None
            else:
                raise ValueError(option)
        except ValueError:
            raise ConfigError(f"bad scheme option '{option}' in '{text}'", field="schemes") from None

    if kind == "sa":
        policy, p, d = CoefficientPolicy.FIXED_REPLICAS, None, 1
    elif kind == "crdsa":
        policy, p, d = CoefficientPolicy.FIXED_REPLICAS, None, d or 2
    elif p is not None:
        policy, d = CoefficientPolicy.FIXED_PROBABILITY, None
    elif d is not None:
        policy = CoefficientPolicy.FIXED_REPLICAS

    try:
        protocol = ProtocolConfig(
            slots=config.slots,
            field_bits=config.field_bits,
            policy=policy,
            p=p,
            d=d,
            backlog=config.backlog,
            feedback=feedback,
            ideal_phy=config.ideal_phy if kind == "ncdp" else True,
            decoder=Decoder(config.decoder),
            preamble_collisions=config.preamble_collisions,
            preamble_limit=config.preamble_limit,
            max_iterations=config.max_iterations,
        )
    except ValidationError as e:
        raise ConfigError(e.errors()[0]["msg"], field="schemes") from e
    return SchemeSpec(text.strip(), kind, protocol)


def link_config(config: ExperimentConfig, ebn0_db: float, strategy: str = "ideal",
                dt_max: Optional[float] = None) -> LinkConfig:
    return LinkConfig(
        ebn0_db=ebn0_db,
        strategy=SamplingStrategy(strategy),
        dt_max=config.dt_max if dt_max is None else dt_max,
        csi=config.csi,
        amplitude_spread_db=config.amplitude_spread_db,
        max_freq_offset=config.max_freq_offset,
        rolloff=config.rolloff,
        span=config.span,
        oversampling=config.oversampling,
        em=em_config(config),
    )


def em_config(config: ExperimentConfig) -> EmConfig:
    return EmConfig(
        relaxation=config.em_relaxation,
        iterations=config.em_iterations,
        restarts=config.em_restarts,
        max_freq_offset=max(config.max_freq_offset, 1e-6),
    )


def _proportion(failures: int, trials: int) -> Tuple[float, float]:
    rate = failures / trials
    return rate, float(np.sqrt(rate * (1.0 - rate) / trials))


def _mean_and_stderr(values: List[float]) -> Tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    if arr.size < 2:
        return float(arr.mean()) if arr.size else 0.0, 0.0
    return float(arr.mean()), float(arr.std(ddof=1) / np.sqrt(arr.size))


# Point tasks

def throughput_point(
    kind: str,
    protocol: ProtocolConfig,
    load: float,
    frames: int,
    master_seed: int,
    x_index: int,
    link: Optional[LinkConfig] = None,
) -> List[Measurement]:
    """Frame simulation of one scheme at one load."""
    traffic = TrafficModel(load=load)
    traffic_rng = trial_rng(master_seed, x_index, 0)
    rng = trial_rng(master_seed, x_index, 1)
    if kind == "ncdp":
        slot_link = None if protocol.ideal_phy else SlotLink(link, protocol.field_spec)
        metrics = simulate_ncdp(protocol, traffic, frames, rng, slot_link, traffic_rng)
    elif kind == "crdsa":
        metrics = simulate_crdsa(protocol, traffic, frames, rng, traffic_rng)
    else:
        metrics = simulate_sa(traffic, protocol.slots, frames, rng, protocol.feedback,
                              protocol.backlog, traffic_rng, protocol.preamble_collisions,
                              protocol.preamble_limit)
    return [
        Measurement("throughput", metrics.throughput, metrics.throughput_stderr, metrics.frames),
        Measurement("loss", metrics.loss, metrics.loss_stderr, metrics.frames),
        Measurement("energy", metrics.energy, metrics.energy_stderr, metrics.frames),
    ]


def fer_point(link: LinkConfig, field_bits: int, k: int, trials: int,
              master_seed: int, x_index: int) -> List[Measurement]:
    """Frame error rate of XOR decoding for k colliding bursts."""
    slot_link = SlotLink(link, FieldSpec(field_bits))
    failures = sum(not slot_link.xor_trial(k, trial_rng(master_seed, x_index, t)) for t in range(trials))
    fer, se = _proportion(failures, trials)
    return [Measurement("fer", fer, se, trials)]


def estimation_point(
    esn0_db: float,
    k: int,
    trials: int,
    shape: PulseShape,
    em: EmConfig,
    amplitude_spread_db: float,
    max_freq_offset: float,
    master_seed: int,
    x_index: int,
) -> List[Measurement]:
    """
    EM accuracy on preamble-only collisions of k terminals.

    Every trial observes the same terminals in two slots (fresh phases)
    and also reports the error after pooling both slots.
    """
    bank = PreambleBank.walsh_hadamard()
    n0 = noise_variance(esn0_db)
    collected: Dict[str, List[float]] = {
        "freq_mse": [], "phase_mse": [], "amplitude_mse": [],
        "freq_mse_combined": [], "amplitude_mse_combined": [],
    }
    for t in range(trials):
        rng = trial_rng(master_seed, x_index, t)
        preambles = [int(mu) for mu in rng.choice(np.arange(1, bank.size + 1), size=k, replace=False)]
        bases = [ChannelParams.draw(rng, amplitude_spread_db, max_freq_offset) for _ in range(k)]
        per_slot = []
        for slot_index in range(2):
            params = bases if slot_index == 0 else [b.with_phase(float(rng.uniform(-np.pi, np.pi))) for b in bases]
            bursts = [(Burst.build(mu, np.empty(0), bank, i), p) for i, (mu, p) in enumerate(zip(preambles, params))]
            slot = synthesize_collision(bursts, n0, shape, rng)
            per_slot.append(em_estimate(slot, preambles, bank, em, rng))
            if slot_index == 0:
                first = [per_slot[0].for_preamble(mu) for mu in preambles]
                collected["freq_mse"].append(frequency_mse([e.freq_offset for e in first],
                                                           [p.freq_offset for p in params]))
                collected["phase_mse"].append(phase_mse([e.phase for e in first], [p.phase for p in params]))
                collected["amplitude_mse"].append(amplitude_mse([e.amplitude for e in first],
                                                                [p.amplitude for p in params]))
        combined = combine_estimates(per_slot)
        pooled = [combined.for_preamble(mu) for mu in preambles]
        collected["freq_mse_combined"].append(frequency_mse([e.freq_offset for e in pooled],
                                                            [b.freq_offset for b in bases]))
        collected["amplitude_mse_combined"].append(amplitude_mse([e.amplitude for e in pooled],
                                                                 [b.amplitude for b in bases]))
    out = []
    for metric, values in collected.items():
        mean, se = _mean_and_stderr(values)
        out.append(Measurement(metric, mean, se, trials))
    return out


def analytic_point(load: float, slots: int, field_bits: int) -> List[Measurement]:
    return [
        Measurement("prob_active_le_S", analytic.prob_active_le_S(load, slots)),
        Measurement("throughput_analytic", analytic.throughput_analytic(load, slots, field_bits)),
        Measurement("throughput_limit", analytic.throughput_limit(load, slots)),
        Measurement("throughput_sa", analytic.slotted_aloha_throughput(load)),
    ]


def threshold_point(slots: int, p: Optional[float]) -> List[Measurement]:
    out = []
    if slots >= 2:
        p_min = analytic.sparsity_threshold(slots)
        out += [
            Measurement("sparsity_threshold", p_min),
            Measurement("expected_replicas_at_threshold", analytic.expected_replicas(slots, p_min)),
        ]
    if p is not None:
        out.append(Measurement("expected_replicas", analytic.expected_replicas(slots, p)))
    return out


# Planners

def _load_points(config: ExperimentConfig, feedback: Feedback, frames: int) -> List[SweepPoint]:
    schemes = [parse_scheme(s, config, feedback) for s in config.schemes]
    link = None
    if not config.ideal_phy:
        link = link_config(config, config.ebn0_db[0], "ideal", dt_max=0.0)
    points = []
    for scheme in schemes:
        for x_index, load in enumerate(config.loads):
            points.append(SweepPoint(
                index=len(points),
                series=scheme.label,
                x=float(load),
                task=throughput_point,
                kwargs=dict(kind=scheme.kind, protocol=scheme.protocol, load=float(load), frames=frames,
                            master_seed=config.master_seed, x_index=x_index, link=link),
            ))
    return points


@experiment(
    "throughput-nofeedback",
    sweep="G",
    defaults={"slots": 100, "loads": DEFAULT_LOADS, "decoder": "full-rank",
              "schemes": ("ncdp:p=0.9961", "ncdp:p=0.0625", "ncdp:p=0.0461")},
)
def plan_throughput_nofeedback(config: ExperimentConfig) -> List[SweepPoint]:
    """
    Throughput, loss and energy versus load, no retransmissions. Frames
    decode all-or-nothing over the terminals that transmitted.
    """
    return _load_points(config, Feedback.NONE, config.frames or THROUGHPUT_FRAMES)


ARQ_SCHEMES = ("ncdp:d=2", "ncdp:d=3", "crdsa:d=3", "ncdp:p=0.0453", "ncdp:p=0.9961")


@experiment(
    "throughput-arq",
    sweep="G",
    defaults={"slots": 150, "backlog": 50, "loads": DEFAULT_LOADS, "schemes": ARQ_SCHEMES,
              "preamble_limit": False},
)
def plan_throughput_arq(config: ExperimentConfig) -> List[SweepPoint]:
    """Throughput, loss and energy versus load with ARQ retransmissions."""
    return _load_points(config, Feedback.ARQ, config.frames or ARQ_FRAMES)


def summarize_peaks(config: ExperimentConfig, rows: List[ResultRow]) -> List[ResultRow]:
    """Peak throughput per scheme and the energy spent at that load."""
    extra = []
    for label in dict.fromkeys(r.series for r in rows):
        curve = [r for r in rows if r.series == label and r.metric == "throughput"]
        energy = {r.x: r for r in rows if r.series == label and r.metric == "energy"}
        if not curve:
            continue
        peak = max(curve, key=lambda r: r.value)
        extra.append(peak.model_copy(update={"metric": "peak_throughput"}))
        if peak.x in energy:
            extra.append(energy[peak.x].model_copy(update={"metric": "energy_at_peak"}))
        finite = [r for r in energy.values() if r.value > 0]
        if finite:
            extra.append(min(finite, key=lambda r: r.value).model_copy(update={"metric": "min_energy"}))
    return extra


@experiment(
    "energy",
    sweep="G",
    defaults={"slots": 150, "backlog": 50, "loads": DEFAULT_LOADS, "schemes": ARQ_SCHEMES,
              "preamble_limit": False},
    summarize=summarize_peaks,
)
def plan_energy(config: ExperimentConfig) -> List[SweepPoint]:
    """ARQ throughput and energy per scheme, with peak summaries."""
    return _load_points(config, Feedback.ARQ, config.frames or ARQ_FRAMES)


@experiment("fer", sweep="ebn0_db", requires=["ebn0_db"], defaults={"collision_sizes": (1, 2, 4)})
def plan_fer(config: ExperimentConfig) -> List[SweepPoint]:
    """XOR frame error rate versus Eb/N0 per collision size, symbol-synchronous."""
    trials = config.trials or FER_TRIALS
    points = []
    for k in config.collision_sizes:
        for x_index, ebn0 in enumerate(config.ebn0_db):
            points.append(SweepPoint(
                index=len(points),
                series=f"k={k}",
                x=float(ebn0),
                task=fer_point,
                kwargs=dict(link=link_config(config, float(ebn0), "ideal", dt_max=0.0),
                            field_bits=config.field_bits, k=int(k), trials=trials,
                            master_seed=config.master_seed, x_index=x_index),
            ))
    return points


@experiment("estimation-mse", sweep="esn0_db", requires=["esn0_db"], defaults={"collision_sizes": (1, 2, 4)})
def plan_estimation(config: ExperimentConfig) -> List[SweepPoint]:
    """EM frequency, phase and amplitude MSE versus Es/N0 per collision size."""
    trials = config.trials or ESTIMATION_TRIALS
    shape = PulseShape(config.rolloff, config.span, config.oversampling)
    em = em_config(config)
    points = []
    for k in config.collision_sizes:
        for x_index, esn0 in enumerate(config.esn0_db):
            points.append(SweepPoint(
                index=len(points),
                series=f"k={k}",
                x=float(esn0),
                task=estimation_point,
                kwargs=dict(esn0_db=float(esn0), k=int(k), trials=trials, shape=shape, em=em,
                            amplitude_spread_db=config.amplitude_spread_db,
                            max_freq_offset=config.max_freq_offset,
                            master_seed=config.master_seed, x_index=x_index),
            ))
    return points


@experiment(
    "async-fer",
    sweep="ebn0_db",
    requires=["ebn0_db"],
    defaults={"collision_sizes": (5,), "dt_max": 0.25},
)
def plan_async_fer(config: ExperimentConfig) -> List[SweepPoint]:
    """XOR frame error rate under relative delays, one series per sampling strategy."""
    trials = config.trials or FER_TRIALS
    k = int(config.collision_sizes[0])
    points = []
    for strategy in config.strategies:
        # the ideal series is the synchronous reference
        dt_max = 0.0 if strategy == SamplingStrategy.IDEAL.value else config.dt_max
        for x_index, ebn0 in enumerate(config.ebn0_db):
            points.append(SweepPoint(
                index=len(points),
                series=strategy,
                x=float(ebn0),
                task=fer_point,
                kwargs=dict(link=link_config(config, float(ebn0), strategy, dt_max=dt_max),
                            field_bits=config.field_bits, k=k, trials=trials,
                            master_seed=config.master_seed, x_index=x_index),
            ))
    return points


@experiment("analytic-sweep", sweep="G", defaults={"slots": 100, "loads": DEFAULT_LOADS})
def plan_analytic(config: ExperimentConfig) -> List[SweepPoint]:
    """Closed-form throughput curves over the load grid, plus the sparsity threshold."""
    series = f"S={config.slots},n={config.field_bits}"
    points = [
        SweepPoint(i, series, float(load), analytic_point,
                   dict(load=float(load), slots=config.slots, field_bits=config.field_bits))
        for i, load in enumerate(config.loads)
    ]
    points.append(SweepPoint(len(points), "threshold", float(config.slots), threshold_point,
                             dict(slots=config.slots, p=config.p)))
    return points


def check_strategy(name: str) -> None:
    try:
        SamplingStrategy(name)
    except ValueError:
        raise ParameterError(f"unknown sampling strategy '{name}'") from None
