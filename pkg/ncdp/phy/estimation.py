"""
Node identification and EM channel estimation from superimposed preambles.

The preamble region of a slot is matched-filtered at the symbol instants
and treated as r(l) = sum_i A_i exp(j(2*pi*dnu_i*l + phi_i)) w_i(l) + n(l),
where w_i is the Walsh-Hadamard word of terminal i. The EM iteration
splits r into per-terminal estimates (E-step) and fits amplitude, phase
and frequency to each of them (M-step).
"""

import logging
from dataclasses import dataclass, replace
from typing import Collection, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ncdp.config import DEFAULT_MAX_FREQ_OFFSET
from ncdp.exceptions import ParameterError
from ncdp.phy.preamble import PreambleBank
from ncdp.phy.waveform import ChannelParams, CollisionSlot, matched_filter

logger = logging.getLogger(__name__)


class EmConfig(BaseModel):
    """EM estimator settings."""
    model_config = ConfigDict(frozen=True, extra="forbid")

    relaxation: float = Field(0.8, gt=0.0, le=1.0, description="beta_i, weight of the residual in the E-step")
    iterations: int = Field(6, ge=1)
    restarts: int = Field(2, ge=1)
    grid_points: int = Field(64, ge=3, description="frequency grid size of the M-step")
    max_freq_offset: float = Field(DEFAULT_MAX_FREQ_OFFSET, ge=0.0)

    @field_validator("max_freq_offset")
    @classmethod
    def validate_max_freq_offset(cls, v):
        if v >= 0.5:
            raise ValueError("max_freq_offset must stay below half the symbol rate")
        return v


@dataclass(frozen=True)
class UserChannelEstimate:
    """Estimated (A, dnu, phi) of one terminal in one slot."""
    preamble_index: int
    amplitude: float
    freq_offset: float
    phase: float
    residual: float = 0.0

    def to_params(self, rel_delay: float = 0.0) -> ChannelParams:
        return ChannelParams(
            amplitude=max(self.amplitude, 0.0),
            freq_offset=float(np.clip(self.freq_offset, 0.0, DEFAULT_MAX_FREQ_OFFSET)),
            phase=self.phase,
            rel_delay=rel_delay,
        )


@dataclass(frozen=True)
class EmRun:
    """One EM restart: summed M-step objective per iteration and final residual."""
    objective: Tuple[float, ...]
    residual: float


@dataclass(frozen=True)
class ChannelEstimate:
    users: Tuple[UserChannelEstimate, ...]
    residual: float
    runs: Tuple[EmRun, ...] = ()

    def for_preamble(self, mu: int) -> UserChannelEstimate:
        for user in self.users:
            if user.preamble_index == mu:
                return user
        raise KeyError(mu)

    @property
    def trace(self) -> Tuple[float, ...]:
        """Objective trace of the selected run."""
        best = min(self.runs, key=lambda run: run.residual) if self.runs else None
        return best.objective if best else ()


def correlate_preambles(samples: np.ndarray, bank: PreambleBank,
                        freq_grid: Sequence[float] = (0.0,)) -> np.ndarray:
    """
    Correlation magnitude of the preamble samples with every word.

    A clean burst of amplitude A yields A * L on its own word. With more
    than one grid frequency the maximum over the grid is returned.
    """
    r = np.asarray(samples, dtype=np.complex128)[: bank.length]
    if r.size != bank.length:
        raise ParameterError(f"need {bank.length} preamble samples, got {r.size}")
    l = np.arange(bank.length)
    rotations = np.exp(-2j * np.pi * np.outer(np.asarray(freq_grid, dtype=np.float64), l))
    return np.abs((rotations * r[None, :]) @ bank.words.T).max(axis=0)


def preamble_samples(slot: CollisionSlot, bank: PreambleBank, offset: float = 0.0) -> np.ndarray:
    return matched_filter(slot, offset, 0, bank.length)


def identify_nodes(
    slot: CollisionSlot,
    bank: PreambleBank,
    threshold: float = 0.5,
    freq_grid: Sequence[float] = (0.0,),
) -> Set[int]:
    """Preamble indices whose normalised correlation exceeds ``threshold``."""
    corr = correlate_preambles(preamble_samples(slot, bank), bank, freq_grid) / bank.length
    found = {int(mu) for mu in np.flatnonzero(corr > threshold) + 1}
    logger.debug("identified preambles %s", sorted(found))
    return found


def mstep_fit(
    z: np.ndarray,
    max_freq_offset: float,
    grid_points: int = 64,
) -> Tuple[float, float, float, float]:
    """
    Least-squares fit of A exp(j(2*pi*dnu*l + phi)) to ``z``.

    Coarse grid over [0, max_freq_offset], closed-form amplitude and
    phase for each grid frequency, one parabolic refinement step.
    Returns (amplitude, freq_offset, phase, objective).
    """
    z = np.asarray(z, dtype=np.complex128)
    n = z.size
    l = np.arange(n)
    energy = float(np.sum(np.abs(z) ** 2))

    def fit(nu: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        c = np.exp(-2j * np.pi * np.outer(nu, l)) @ z / n
        return c, energy - n * np.abs(c) ** 2

    grid = np.linspace(0.0, max_freq_offset, grid_points) if max_freq_offset > 0 else np.zeros(1)
    coeffs, cost = fit(grid)
    best = int(np.argmin(cost))
    nu, c, objective = grid[best], coeffs[best], cost[best]

    if 0 < best < grid.size - 1:
        left, mid, right = cost[best - 1], cost[best], cost[best + 1]
        curvature = left - 2 * mid + right
        if curvature > 0:
            step = grid[1] - grid[0]
            shift = float(np.clip(0.5 * (left - right) / curvature, -0.5, 0.5)) * step
            c_ref, cost_ref = fit(np.array([nu + shift]))
            if cost_ref[0] < objective:
                nu, c, objective = nu + shift, c_ref[0], cost_ref[0]

    return float(np.abs(c)), float(nu), float(np.angle(c)), float(max(objective, 0.0))


def _em_run(
    r: np.ndarray,
    words: np.ndarray,
    cfg: EmConfig,
    rng: np.random.Generator,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray, EmRun]:
    k, n = words.shape
    l = np.arange(n)
    amp = rng.uniform(0.0, 2.0, size=k)
    amp[amp == 0.0] = 2.0
    phase = rng.uniform(-np.pi, np.pi, size=k)
    nu = rng.uniform(0.0, cfg.max_freq_offset, size=k)
    per_user = np.zeros(k)
    objective: List[float] = []

    def models() -> np.ndarray:
        return amp[:, None] * np.exp(1j * (2 * np.pi * nu[:, None] * l[None, :] + phase[:, None])) * words

    for iteration in range(cfg.iterations):
        current = models()
        residual = r - current.sum(axis=0)
        estimates = current + cfg.relaxation * residual[None, :]
        for i in range(k):
            amp[i], nu[i], phase[i], per_user[i] = mstep_fit(
                words[i] * estimates[i], cfg.max_freq_offset, cfg.grid_points
            )
        objective.append(float(per_user.sum()))
        if iteration and objective[-1] > objective[-2] * (1 + 1e-9) + 1e-12:
            logger.debug("EM objective rose from %.6g to %.6g", objective[-2], objective[-1])

    final = float(np.sum(np.abs(r - models().sum(axis=0)) ** 2))
    return amp, nu, phase, per_user.copy(), EmRun(tuple(objective), final)


def em_estimate(
    slot: CollisionSlot,
    active: Collection[int],
    bank: PreambleBank,
    cfg: Optional[EmConfig] = None,
    rng: Optional[np.random.Generator] = None,
    samples: Optional[np.ndarray] = None,
) -> ChannelEstimate:
    """
    Joint amplitude, frequency and phase estimates for the ``active``
    preambles. ``cfg.restarts`` random initialisations are run and the
    one with the smallest final residual is kept.
    """
    cfg = cfg or EmConfig()
    active = sorted(int(mu) for mu in active)
    if not active:
        raise ParameterError("EM estimation needs at least one active preamble")
    rng = rng if rng is not None else np.random.default_rng()
    r = preamble_samples(slot, bank) if samples is None else np.asarray(samples, dtype=np.complex128)
    words = np.stack([bank.word(mu) for mu in active])

    best = None
    runs: List[EmRun] = []
    for _ in range(cfg.restarts):
        result = _em_run(r, words, cfg, rng)
        runs.append(result[-1])
        if best is None or result[-1].residual < best[-1].residual:
            best = result

    amp, nu, phase, per_user, run = best
    users = tuple(
        UserChannelEstimate(mu, float(amp[i]), float(nu[i]), float(phase[i]), float(per_user[i]))
        for i, mu in enumerate(active)
    )
    return ChannelEstimate(users, run.residual, tuple(runs))


def combine_estimates(estimates: Sequence[ChannelEstimate]) -> ChannelEstimate:
    """
    Pool amplitude and frequency of each terminal across the slots it
    used, weighting each slot by the inverse of its fit residual.

    The result describes the first slot: its terminals, phases and
    residual. Phases change from slot to slot and are never pooled.
    """
    if not estimates:
        raise ParameterError("nothing to combine")
    first = estimates[0]
    if len(estimates) == 1:
        return first
    users = []
    for user in first.users:
        seen = [user]
        for other in estimates[1:]:
            try:
                seen.append(other.for_preamble(user.preamble_index))
            except KeyError:
                continue
        users.append(_pool(seen))
    return replace(first, users=tuple(users))


def _pool(seen: Sequence[UserChannelEstimate]) -> UserChannelEstimate:
    residuals = np.array([e.residual for e in seen], dtype=np.float64)
    if np.all(residuals <= 0):
        weights = np.ones_like(residuals)
    else:
        weights = 1.0 / np.maximum(residuals, np.min(residuals[residuals > 0]) * 1e-6)
    weights /= weights.sum()
    return replace(
        seen[0],
        amplitude=float(np.dot(weights, [e.amplitude for e in seen])),
        freq_offset=float(np.dot(weights, [e.freq_offset for e in seen])),
    )


def wrap_phase(phi: np.ndarray) -> np.ndarray:
    return (np.asarray(phi) + np.pi) % (2 * np.pi) - np.pi


def frequency_mse(estimated: Iterable[float], true: Iterable[float]) -> float:
    e, t = np.asarray(list(estimated)), np.asarray(list(true))
    return float(np.mean((e - t) ** 2))


def phase_mse(estimated: Iterable[float], true: Iterable[float]) -> float:
    """Wrapped phase error, normalised by pi^2."""
    e, t = np.asarray(list(estimated)), np.asarray(list(true))
    return float(np.mean(wrap_phase(e - t) ** 2) / np.pi ** 2)


def amplitude_mse(estimated: Iterable[float], true: Iterable[float]) -> float:
    """Amplitude error relative to the true amplitude."""
    e, t = np.asarray(list(estimated)), np.asarray(list(true))
    return float(np.mean(((e - t) / t) ** 2))
