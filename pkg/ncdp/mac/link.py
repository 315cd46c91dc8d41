"""
Full physical-layer slot link.

A terminal's message (GF(2^n) symbols) is multiplied by its slot
coefficient, CRC-protected, channel-encoded, BPSK-mapped and sent behind
its preamble. The receiver samples the collision, computes XOR LLRs,
decodes and checks the CRC; a passing slot contributes one equation.
"""

import logging
from dataclasses import dataclass
from typing import List, Literal, Optional, Sequence, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ncdp.config import DEFAULT_MAX_FREQ_OFFSET, MAX_COLLISION_SIZE
from ncdp.exceptions import ParameterError
from ncdp.fec import CRC8, CRC16, CodeRegistry, CodeSpec, CrcSpec, crc_append, crc_check
from ncdp.galois import FieldMatrix, FieldSpec, bits_to_symbols, get_field, symbols_to_bits
from ncdp.phy.estimation import EmConfig, em_estimate, identify_nodes
from ncdp.phy.preamble import PreambleBank
from ncdp.phy.waveform import (
    Burst,
    ChannelParams,
    CollisionSlot,
    PulseShape,
    SamplingStrategy,
    matched_filter_and_sample,
    noise_variance_from_ebn0,
    sampling_model,
    synthesize_collision,
)
from ncdp.phy.xorllr import llr_multi_sample

logger = logging.getLogger(__name__)

CRC_PRESETS = {"crc16": CRC16, "crc8": CRC8}

# Frequencies searched when correlating preambles.
IDENTIFICATION_GRID = 9


class LinkConfig(BaseModel):
    """Physical-layer settings of the full-PHY simulations."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    ebn0_db: float = 8.0
    strategy: SamplingStrategy = SamplingStrategy.IDEAL
    dt_max: float = Field(0.0, ge=0.0, le=0.5, description="largest relative delay, in symbols")
    csi: Literal["perfect", "estimated"] = "perfect"
    amplitude_spread_db: float = Field(0.0, ge=0.0)
    max_freq_offset: float = Field(DEFAULT_MAX_FREQ_OFFSET, ge=0.0, le=DEFAULT_MAX_FREQ_OFFSET)
    rolloff: float = Field(0.35, ge=0.0, le=1.0)
    span: int = Field(12, ge=2)
    oversampling: int = Field(8, ge=1)
    code: str = "conv-k7-133-171"
    info_bits: int = Field(744, ge=1)
    tail_bits: int = Field(8, ge=0)
    crc: Literal["crc16", "crc8"] = "crc16"
    em: EmConfig = EmConfig()
    detection_threshold: float = Field(0.5, gt=0.0, lt=1.0, description="normalised preamble correlation that counts as present")

    @property
    def shape(self) -> PulseShape:
        return PulseShape(self.rolloff, self.span, self.oversampling)

    @property
    def code_spec(self) -> CodeSpec:
        return CodeSpec(self.code, self.info_bits, self.tail_bits)

    @property
    def crc_spec(self) -> CrcSpec:
        return CRC_PRESETS[self.crc]

    @property
    def payload_bits(self) -> int:
        return self.info_bits - self.crc_spec.width


@dataclass(frozen=True)
class Transmission:
    """One burst in one slot: who sent it, with which code bits, over which channel."""
    terminal_id: int
    preamble: int
    code_bits: np.ndarray
    channel: ChannelParams


@dataclass(frozen=True)
class SlotOutcome:
    decoded: bool
    info_bits: Optional[np.ndarray] = None
    symbols: Optional[np.ndarray] = None
    reliability: float = 0.0


class SlotLink:
    """Transmitter and receiver chain for one slot of colliding bursts."""

    def __init__(self, cfg: LinkConfig, field: Optional[FieldSpec] = None,
                 bank: Optional[PreambleBank] = None) -> None:
        self.cfg = cfg
        self.field = field or FieldSpec(8)
        self.bank = bank or PreambleBank.walsh_hadamard()
        self.shape = cfg.shape
        self.code = CodeRegistry.create(cfg.code_spec)
        self.crc = cfg.crc_spec
        self.noise_var = noise_variance_from_ebn0(cfg.ebn0_db, self.code.rate)
        if cfg.payload_bits <= 0 or cfg.payload_bits % self.field.n:
            raise ParameterError(
                f"{cfg.payload_bits} payload bits do not split into GF(2^{self.field.n}) symbols"
            )

    @property
    def message_symbols(self) -> int:
        return self.cfg.payload_bits // self.field.n

    def random_messages(self, count: int, rng: np.random.Generator) -> np.ndarray:
        return get_field(self.field).random(rng, (count, self.message_symbols))

    def encode(self, message: np.ndarray, coefficient: int = 1) -> np.ndarray:
        """Precode by the slot coefficient, append the CRC and channel-encode."""
        precoded = get_field(self.field).mul(coefficient, np.asarray(message, dtype=np.int64))
        bits = crc_append(symbols_to_bits(precoded, self.field.n), self.crc)
        return self.code.encode(bits)

    def draw_channel(self, rng: np.random.Generator) -> ChannelParams:
        """Frame-constant amplitude and frequency offset."""
        return ChannelParams.draw(rng, self.cfg.amplitude_spread_db, self.cfg.max_freq_offset)

    def slot_channels(self, bases: Sequence[ChannelParams], rng: np.random.Generator) -> List[ChannelParams]:
        """
        Fresh phases and relative delays for the bursts sharing one slot.
        Delays are measured from the earliest burst, which arrives at 0.
        The IDEAL strategy is the synchronous reference and gets no delays.
        """
        delays = np.zeros(len(bases))
        if bases and self.cfg.dt_max > 0 and self.cfg.strategy is not SamplingStrategy.IDEAL:
            delays = rng.uniform(0.0, self.cfg.dt_max, size=len(bases))
            delays -= delays.min()
        return [
            ChannelParams(b.amplitude, b.freq_offset, float(rng.uniform(-np.pi, np.pi)), float(delay))
            for b, delay in zip(bases, delays)
        ]

    def identify(self, slot: CollisionSlot) -> Set[int]:
        """Preambles detected in the slot, searched over the frequency-offset range."""
        grid = np.linspace(0.0, self.cfg.max_freq_offset, IDENTIFICATION_GRID)
        return identify_nodes(slot, self.bank, self.cfg.detection_threshold, grid)

    def _receiver_channels(self, slot: CollisionSlot, transmissions: Sequence[Transmission],
                           rng: np.random.Generator) -> Optional[List[ChannelParams]]:
        """
        Channels the receiver decodes with, or None when a burst the
        access pattern places in this slot is not detected.
        """
        truth = [t.channel for t in transmissions]
        if self.cfg.csi == "perfect":
            return truth
        expected = {t.preamble for t in transmissions}
        missing = expected - self.identify(slot)
        if missing:
            logger.debug("preambles %s not detected", sorted(missing))
            return None
        estimate = em_estimate(slot, expected, self.bank, self.cfg.em, rng)
        return [
            estimate.for_preamble(t.preamble).to_params(rel_delay=t.channel.rel_delay)
            for t in transmissions
        ]

    def receive(self, transmissions: Sequence[Transmission], rng: np.random.Generator) -> SlotOutcome:
        """Decode the XOR of the colliding bursts and check its CRC."""
        k = len(transmissions)
        if k == 0:
            return SlotOutcome(False)
        if k > MAX_COLLISION_SIZE:
            logger.debug("dropping slot with %d bursts", k)
            return SlotOutcome(False)

        bursts = [
            (Burst.build(t.preamble, 2.0 * np.asarray(t.code_bits, dtype=np.float64) - 1.0, self.bank, t.terminal_id),
             t.channel)
            for t in transmissions
        ]
        slot = synthesize_collision(bursts, self.noise_var, self.shape, rng)
        params = self._receiver_channels(slot, transmissions, rng)
        if params is None:
            return SlotOutcome(False)

        first = self.bank.length
        n_code = self.code.code_bits
        delays = [p.rel_delay for p in params]
        sampled = matched_filter_and_sample(
            slot, self.cfg.strategy, delays, self.cfg.dt_max or None, first, n_code
        )
        model = sampling_model(self.cfg.strategy, params, sampled.offsets, self.shape, n_code, first, self.cfg.dt_max)
        llrs = llr_multi_sample(sampled.samples, self.cfg.strategy, model, self.noise_var)

        info, reliability = self.code.decode_soft(llrs)
        if not crc_check(info, self.crc):
            return SlotOutcome(False, info, None, float(reliability))
        payload = info[: -self.crc.width]
        return SlotOutcome(True, info, bits_to_symbols(payload, self.field.n), float(reliability))

    def xor_trial(self, k: int, rng: np.random.Generator) -> bool:
        """
        One collision of ``k`` terminals with unit coefficients. True when
        the slot decodes to the XOR of the transmitted messages.
        """
        messages = self.random_messages(k, rng)
        preambles = rng.choice(np.arange(1, self.bank.size + 1), size=k, replace=False)
        channels = self.slot_channels([self.draw_channel(rng) for _ in range(k)], rng)
        transmissions = [
            Transmission(i, int(preambles[i]), self.encode(messages[i]), channels[i])
            for i in range(k)
        ]
        outcome = self.receive(transmissions, rng)
        if not outcome.decoded:
            return False
        expected = np.bitwise_xor.reduce(messages, axis=0)
        return bool(np.array_equal(outcome.symbols, expected))

    def run_frame(
        self,
        pattern: FieldMatrix,
        preambles: Sequence[int],
        rng: np.random.Generator,
    ) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """
        Send every terminal's message in the slots its column selects.

        Returns the decoded-row mask, the decoded row payloads and the true
        messages, one row per terminal.
        """
        n_tx = pattern.cols
        messages = self.random_messages(n_tx, rng)
        base = [self.draw_channel(rng) for _ in range(n_tx)]
        decoded = np.zeros(pattern.rows, dtype=bool)
        values = np.zeros((pattern.rows, self.message_symbols), dtype=np.int64)
        for j in range(pattern.rows):
            users = np.flatnonzero(pattern.entries[j])
            if users.size == 0:
                continue
            channels = self.slot_channels([base[i] for i in users], rng)
            transmissions = [
                Transmission(int(i), int(preambles[i]), self.encode(messages[i], int(pattern.entries[j, i])),
                             channel)
                for i, channel in zip(users, channels)
            ]
            outcome = self.receive(transmissions, rng)
            if outcome.decoded:
                decoded[j] = True
                values[j] = outcome.symbols
        return decoded, values, messages
