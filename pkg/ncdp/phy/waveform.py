"""
Baseband waveform synthesis and matched filtering.

Time is measured in symbol periods (T_s = 1). Sample ``n`` of a slot
sits at time ``(n - M) / oversampling`` where ``M`` is half the pulse
span in samples, so ``t = 0`` is the peak of the first symbol of a burst
with zero relative delay. Frequency offsets are in cycles per symbol.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from ncdp.config import (
    DEFAULT_MAX_FREQ_OFFSET,
    DEFAULT_OVERSAMPLING,
    DEFAULT_ROLLOFF,
    DEFAULT_SPAN,
)
from ncdp.exceptions import ParameterError

logger = logging.getLogger(__name__)

MAX_RELATIVE_DELAY = 0.5


class SamplingStrategy(str, Enum):
    """How the matched-filter output is sampled under symbol asynchronism."""
    IDEAL = "ideal"
    MD = "md"
    ML = "ml"
    MS = "ms"
    US = "us"
    EC = "ec"

    @property
    def multi_sample(self) -> bool:
        return self in (SamplingStrategy.ML, SamplingStrategy.MS, SamplingStrategy.US, SamplingStrategy.EC)


@dataclass(frozen=True)
class PulseShape:
    """
    SRRC pulse parameters.

    Handles the standard link setting and a cheaper variant for quick
    sweeps; both keep the Nyquist property of the composite pulse.
    """
    rolloff: float = DEFAULT_ROLLOFF
    span: int = DEFAULT_SPAN
    oversampling: int = DEFAULT_OVERSAMPLING

    def __post_init__(self) -> None:
        if not 0.0 <= self.rolloff <= 1.0:
            raise ParameterError(f"rolloff must be in [0, 1], got {self.rolloff}")
        if self.span < 2 or self.span % 2:
            raise ParameterError(f"span must be an even number of symbols >= 2, got {self.span}")
        if self.oversampling < 1:
            raise ParameterError(f"oversampling must be >= 1, got {self.oversampling}")

    @property
    def half_length(self) -> int:
        """Half the filter length in samples."""
        return self.span * self.oversampling // 2

    @property
    def num_taps(self) -> int:
        return 2 * self.half_length + 1

    def num_samples(self, n_symbols: int) -> int:
        """Length of a slot carrying ``n_symbols`` symbols."""
        return (n_symbols + self.span) * self.oversampling

    @classmethod
    def standard(cls) -> "PulseShape":
        """Roll-off 0.35, 12-symbol span, 8 samples per symbol"""
        return cls(rolloff=0.35, span=12, oversampling=8)

    @classmethod
    def fast(cls) -> "PulseShape":
        """Shorter filter at 4 samples per symbol for quick sweeps"""
        return cls(rolloff=0.35, span=8, oversampling=4)


def raised_cosine(t: np.ndarray, rolloff: float) -> np.ndarray:
    """Raised-cosine pulse p(t) with p(0) = 1 and zeros at nonzero integers."""
    t = np.asarray(t, dtype=np.float64)
    out = np.sinc(t)
    if rolloff == 0.0:
        return out
    denom = 1.0 - (2.0 * rolloff * t) ** 2
    singular = np.isclose(denom, 0.0, atol=1e-12)
    safe = np.where(singular, 1.0, denom)
    out = out * np.cos(np.pi * rolloff * t) / safe
    return np.where(singular, (np.pi / 4.0) * np.sinc(1.0 / (2.0 * rolloff)), out)


def srrc(t: np.ndarray, rolloff: float) -> np.ndarray:
    """Unit-energy square-root raised-cosine pulse g(t) (continuous time)."""
    t = np.asarray(t, dtype=np.float64)
    a = rolloff
    if a == 0.0:
        return np.sinc(t)
    at_zero = np.isclose(t, 0.0, atol=1e-12)
    at_edge = np.isclose(np.abs(t), 1.0 / (4.0 * a), atol=1e-12)
    ts = np.where(at_zero | at_edge, 0.1, t)
    num = np.sin(np.pi * ts * (1 - a)) + 4 * a * ts * np.cos(np.pi * ts * (1 + a))
    den = np.pi * ts * (1 - (4 * a * ts) ** 2)
    out = num / den
    edge = (a / np.sqrt(2)) * (
        (1 + 2 / np.pi) * np.sin(np.pi / (4 * a)) + (1 - 2 / np.pi) * np.cos(np.pi / (4 * a))
    )
    out = np.where(at_edge, edge, out)
    return np.where(at_zero, 1.0 - a + 4.0 * a / np.pi, out)


@lru_cache(maxsize=64)
def _tap_norm(shape: PulseShape) -> float:
    m = np.arange(-shape.half_length, shape.half_length + 1)
    g = srrc(m / shape.oversampling, shape.rolloff)
    return float(np.sqrt(np.sum(g ** 2)))


def srrc_taps(shape: PulseShape, delay: float = 0.0) -> np.ndarray:
    """
    Taps g(m/os - delay) for m in [-M, M], scaled so the undelayed taps
    have unit energy.
    """
    m = np.arange(-shape.half_length, shape.half_length + 1)
    return srrc(m / shape.oversampling - delay, shape.rolloff) / _tap_norm(shape)


def srrc_pulse(shape: PulseShape) -> np.ndarray:
    """Unit-energy SRRC taps."""
    return srrc_taps(shape, 0.0)


@dataclass(frozen=True)
class ChannelParams:
    """Per-burst channel: amplitude, frequency offset, phase and relative delay."""
    amplitude: float = 1.0
    freq_offset: float = 0.0
    phase: float = 0.0
    rel_delay: float = 0.0

    def __post_init__(self) -> None:
        if self.amplitude < 0:
            raise ParameterError(f"amplitude must be non-negative, got {self.amplitude}")
        if abs(self.freq_offset) > DEFAULT_MAX_FREQ_OFFSET + 1e-12:
            raise ParameterError(
                f"frequency offset {self.freq_offset} exceeds {DEFAULT_MAX_FREQ_OFFSET} cycles/symbol"
            )
        if not -np.pi - 1e-12 <= self.phase <= np.pi + 1e-12:
            raise ParameterError(f"phase must be in [-pi, pi], got {self.phase}")
        if not 0.0 <= self.rel_delay <= MAX_RELATIVE_DELAY:
            raise ParameterError(f"relative delay must be in [0, 0.5], got {self.rel_delay}")

    def with_phase(self, phase: float) -> "ChannelParams":
        return ChannelParams(self.amplitude, self.freq_offset, phase, self.rel_delay)

    def gain(self, time: np.ndarray) -> np.ndarray:
        """A * exp(j(2*pi*dnu*t + phi)) at the given times."""
        t = np.asarray(time, dtype=np.float64)
        return self.amplitude * np.exp(1j * (2 * np.pi * self.freq_offset * t + self.phase))

    @classmethod
    def draw(
        cls,
        rng: np.random.Generator,
        amplitude_spread_db: float = 0.0,
        max_freq_offset: float = DEFAULT_MAX_FREQ_OFFSET,
        max_delay: float = 0.0,
    ) -> "ChannelParams":
        """
        Random channel: lognormal amplitude (constant 1 when the spread is
        zero), uniform frequency offset, phase and delay.
        """
        if amplitude_spread_db > 0:
            amplitude = float(10 ** (rng.normal(0.0, amplitude_spread_db) / 20.0))
        else:
            amplitude = 1.0
        return cls(
            amplitude=amplitude,
            freq_offset=float(rng.uniform(0.0, max_freq_offset)),
            phase=float(rng.uniform(-np.pi, np.pi)),
            rel_delay=float(rng.uniform(0.0, max_delay)) if max_delay > 0 else 0.0,
        )


@dataclass(frozen=True)
class Burst:
    """Preamble followed by the BPSK payload of one terminal in one slot."""
    preamble_index: int
    preamble: np.ndarray
    payload: np.ndarray
    terminal_id: int = 0

    def __post_init__(self) -> None:
        for name in ("preamble", "payload"):
            arr = np.asarray(getattr(self, name), dtype=np.float64).ravel()
            if arr.size and not np.all(np.abs(arr) == 1.0):
                raise ParameterError(f"{name} symbols must be +/-1")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def symbols(self) -> np.ndarray:
        return np.concatenate([self.preamble, self.payload])

    @property
    def n_symbols(self) -> int:
        return int(self.preamble.size + self.payload.size)

    def samples(self, shape: PulseShape, delay: float = 0.0) -> np.ndarray:
        """Real baseband samples of the burst through a unit channel."""
        up = np.zeros(self.n_symbols * shape.oversampling)
        up[:: shape.oversampling] = self.symbols
        return np.convolve(up, srrc_taps(shape, delay))

    @classmethod
    def build(cls, preamble_index: int, payload_symbols: np.ndarray, bank, terminal_id: int = 0) -> "Burst":
        return cls(preamble_index, bank.word(preamble_index), np.asarray(payload_symbols), terminal_id)


@dataclass(frozen=True)
class CollisionSlot:
    """Superposed baseband samples of k bursts plus noise."""
    samples: np.ndarray
    noise_var: float
    n_symbols: int
    shape: PulseShape
    truth: Tuple[Tuple[int, ChannelParams], ...] = field(default_factory=tuple)

    def __post_init__(self) -> None:
        if self.samples.shape != (self.shape.num_samples(self.n_symbols),):
            raise ParameterError(
                f"{self.samples.shape[0]} samples do not carry {self.n_symbols} symbols"
            )

    @property
    def collision_size(self) -> int:
        return len(self.truth)


def noise_variance(esn0_db: float, symbol_energy: float = 1.0) -> float:
    """Per-component noise variance for a given Es/N0 in dB."""
    return symbol_energy / (2.0 * 10 ** (esn0_db / 10.0))


def noise_variance_from_ebn0(ebn0_db: float, rate: float) -> float:
    """Per-component noise variance for a given Eb/N0 in dB and code rate."""
    if not 0 < rate <= 1:
        raise ParameterError(f"code rate must be in (0, 1], got {rate}")
    return noise_variance(ebn0_db + 10 * np.log10(rate))


def synthesize_collision(
    bursts: Sequence[Tuple[Burst, ChannelParams]],
    noise_var: float,
    shape: PulseShape,
    rng: Optional[np.random.Generator] = None,
) -> CollisionSlot:
    """Sum of channel-distorted bursts plus complex AWGN of variance N0 per component."""
    if not bursts:
        raise ParameterError("a collision needs at least one burst")
    n_symbols = bursts[0][0].n_symbols
    if any(b.n_symbols != n_symbols for b, _ in bursts):
        raise ParameterError("all bursts in a slot must have the same length")
    if noise_var < 0:
        raise ParameterError(f"noise variance must be non-negative, got {noise_var}")

    length = shape.num_samples(n_symbols)
    times = (np.arange(length) - shape.half_length) / shape.oversampling
    total = np.zeros(length, dtype=np.complex128)
    for burst, params in bursts:
        total += burst.samples(shape, params.rel_delay) * params.gain(times)

    if noise_var > 0:
        rng = rng if rng is not None else np.random.default_rng()
        sigma = np.sqrt(noise_var)
        total += sigma * (rng.standard_normal(length) + 1j * rng.standard_normal(length))

    truth = tuple((burst.terminal_id, params) for burst, params in bursts)
    return CollisionSlot(total, float(noise_var), n_symbols, shape, truth)


def sample_offsets(
    strategy: SamplingStrategy,
    delays: Sequence[float],
    dt_max: Optional[float] = None,
) -> np.ndarray:
    """Sampling instants within a symbol, as fractions of T_s."""
    strategy = SamplingStrategy(strategy)
    delays = np.asarray(delays, dtype=np.float64)
    k = delays.size
    if strategy is SamplingStrategy.IDEAL:
        return np.zeros(1)
    if strategy is SamplingStrategy.US:
        if dt_max is None:
            dt_max = float(delays.max()) if k else 0.0
        if k <= 1:
            return np.array([dt_max / 2.0])
        return np.linspace(0.0, dt_max, k)
    if k == 0:
        raise ParameterError(f"{strategy.value} sampling needs the relative delays")
    if strategy is SamplingStrategy.MD:
        return np.array([delays.mean()])
    return delays.copy()


def matched_filter(slot: CollisionSlot, offset: float, first_symbol: int = 0,
                   n_symbols: Optional[int] = None) -> np.ndarray:
    """Matched-filter output sampled at ``l + offset`` for each symbol l."""
    shape = slot.shape
    if n_symbols is None:
        n_symbols = slot.n_symbols - first_symbol
    windows = sliding_window_view(slot.samples, shape.num_taps)[:: shape.oversampling]
    windows = windows[first_symbol:first_symbol + n_symbols]
    return windows @ srrc_taps(shape, offset)


@dataclass(frozen=True)
class SampleSet:
    """Matched-filter samples of one slot: one column per sampling instant."""
    strategy: SamplingStrategy
    offsets: np.ndarray
    samples: np.ndarray
    first_symbol: int = 0

    @property
    def mean(self) -> np.ndarray:
        """Per-symbol average of the samples."""
        return self.samples.mean(axis=1)

    @property
    def n_symbols(self) -> int:
        return int(self.samples.shape[0])


def matched_filter_and_sample(
    slot: CollisionSlot,
    strategy: SamplingStrategy,
    delays: Sequence[float] = (),
    dt_max: Optional[float] = None,
    first_symbol: int = 0,
    n_symbols: Optional[int] = None,
) -> SampleSet:
    """Sample the matched-filter output at the instants ``strategy`` calls for."""
    strategy = SamplingStrategy(strategy)
    offsets = sample_offsets(strategy, delays, dt_max)
    columns = [matched_filter(slot, float(tau), first_symbol, n_symbols) for tau in offsets]
    return SampleSet(strategy, offsets, np.stack(columns, axis=1), first_symbol)


def equivalent_channel(
    params: ChannelParams,
    sample_delay: float,
    shape: PulseShape,
    symbol_time: float = 0.0,
) -> complex:
    """Channel of a burst seen at a sampling instant, including the pulse mismatch."""
    t = symbol_time + sample_delay
    return complex(params.gain(t) * raised_cosine(sample_delay - params.rel_delay, shape.rolloff))


def channel_matrix(
    params: Sequence[ChannelParams],
    offset: float,
    n_symbols: int,
    first_symbol: int = 0,
) -> np.ndarray:
    """Per-symbol channel h_i(l) at sampling offset ``offset``: shape (n_symbols, k)."""
    times = first_symbol + np.arange(n_symbols) + offset
    return np.stack([p.gain(times) for p in params], axis=1)


# Delay grid the US receiver averages over when it has no delay knowledge.
US_DELAY_GRID = 33


@dataclass(frozen=True)
class SamplingModel:
    """
    What the receiver assumes about the samples it combines in one slot.

    ``nominal`` and ``equivalent`` hold one (N, k) channel matrix per
    sampling instant; ``equivalent`` includes the pulse attenuation seen
    at that instant. ``isi_var`` is the per-component power each instant
    picks up from neighbouring symbols, ``mean_isi_var`` the same for the
    per-symbol average of the samples, and ``mismatch_var`` the error left
    when the average is paired with the nominal channels. The filtered
    noise of two instants correlates as ``noise_corr``.
    """
    offsets: np.ndarray
    nominal: np.ndarray
    equivalent: Optional[np.ndarray] = None
    isi_var: Optional[np.ndarray] = None
    mean_isi_var: float = 0.0
    mismatch_var: float = 0.0
    noise_corr: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        offsets = np.atleast_1d(np.asarray(self.offsets, dtype=np.float64))
        nominal = np.asarray(self.nominal, dtype=np.complex128)
        if nominal.ndim == 2:
            nominal = nominal[None]
        m = offsets.size
        if nominal.ndim != 3 or nominal.shape[0] != m:
            raise ParameterError(f"{m} sampling instants but channels of shape {nominal.shape}")
        if self.equivalent is not None:
            equivalent = np.asarray(self.equivalent, dtype=np.complex128)
            if equivalent.ndim == 2:
                equivalent = equivalent[None]
            if equivalent.shape != nominal.shape:
                raise ParameterError(
                    f"equivalent channels {equivalent.shape} do not match nominal {nominal.shape}"
                )
            object.__setattr__(self, "equivalent", equivalent)
        isi = np.zeros(m) if self.isi_var is None else np.asarray(self.isi_var, dtype=np.float64)
        corr = np.ones((m, m)) if self.noise_corr is None else np.asarray(self.noise_corr, dtype=np.float64)
        if isi.shape != (m,) or corr.shape != (m, m):
            raise ParameterError("interference and noise terms must match the sampling instants")
        object.__setattr__(self, "offsets", offsets)
        object.__setattr__(self, "nominal", nominal)
        object.__setattr__(self, "isi_var", isi)
        object.__setattr__(self, "noise_corr", corr)

    @property
    def instants(self) -> int:
        return int(self.offsets.size)

    @property
    def mean_noise_gain(self) -> float:
        """Noise power of the averaged sample relative to a single one."""
        return float(self.noise_corr.mean())

    @classmethod
    def synchronous(cls, channels: np.ndarray, offsets: Optional[Sequence[float]] = None) -> "SamplingModel":
        """Known channels with no interference and fully correlated noise."""
        channels = np.asarray(channels)
        m = 1 if channels.ndim < 3 else channels.shape[0]
        return cls(np.zeros(m) if offsets is None else offsets, channels)


def sampling_model(
    strategy: SamplingStrategy,
    params: Sequence[ChannelParams],
    offsets: Sequence[float],
    shape: PulseShape,
    n_symbols: int,
    first_symbol: int = 0,
    dt_max: float = 0.0,
) -> SamplingModel:
    """
    Channels and interference the receiver assumes at ``offsets``.

    Neighbouring BPSK symbols leak through the composite pulse at every
    instant off its peak; that leakage is taken as Gaussian with the
    power it carries. Under US the delays are unknown and everything is
    averaged over delays uniform in [0, dt_max].
    """
    strategy = SamplingStrategy(strategy)
    offsets = np.atleast_1d(np.asarray(offsets, dtype=np.float64))
    k = len(params)
    power = np.array([p.amplitude for p in params]) ** 2
    nominal = np.stack([channel_matrix(params, float(tau), n_symbols, first_symbol) for tau in offsets])

    if strategy is SamplingStrategy.US:
        delays = np.linspace(0.0, dt_max, US_DELAY_GRID)[:, None]
    else:
        delays = np.array([[p.rel_delay for p in params]])
    # pulse[g, i, q, n] = p(offset_i - delay_q + n) for delay draw g
    lags = np.arange(-shape.span, shape.span + 1)
    pulse = raised_cosine(
        offsets[None, :, None, None] - delays[:, None, :, None] + lags, shape.rolloff
    )
    peak = pulse[..., shape.span]
    leak = np.delete(pulse, shape.span, axis=-1)

    def per_user(x: np.ndarray) -> float:
        return float(0.5 * np.broadcast_to(x, (k,)) @ power)

    gain = np.broadcast_to(peak.mean(axis=0), (offsets.size, k))
    isi = (leak ** 2).sum(axis=-1).mean(axis=0) + peak.var(axis=0)
    isi_var = 0.5 * np.broadcast_to(isi, (offsets.size, k)) @ power

    averaged = pulse.mean(axis=1)
    avg_peak = averaged[..., shape.span]
    avg_leak = np.delete(averaged, shape.span, axis=-1)
    mean_isi = (avg_leak ** 2).sum(axis=-1).mean(axis=0) + avg_peak.var(axis=0)
    mismatch = ((avg_peak - 1.0) ** 2).mean(axis=0)

    taps = np.stack([srrc_taps(shape, float(tau)) for tau in offsets])
    return SamplingModel(
        offsets=offsets,
        nominal=nominal,
        equivalent=nominal * gain[:, None, :],
        isi_var=isi_var,
        mean_isi_var=per_user(mean_isi),
        mismatch_var=per_user(mismatch),
        noise_corr=taps @ taps.T,
    )
