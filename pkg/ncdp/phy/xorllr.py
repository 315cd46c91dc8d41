"""
Log-likelihood ratios of the bitwise XOR of k colliding BPSK codewords.

For a received sample r and channel vector h, the XOR bit is 1 exactly
when the transmitted symbol vector d in {-1, +1}^k holds an odd number of
+1 entries. The LLR compares the total likelihood of the odd hypotheses
against the even ones; positive values favour XOR bit 1.
"""

import itertools
import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import logsumexp

from ncdp.config import LLR_CLAMP, MAX_COLLISION_SIZE
from ncdp.exceptions import ParameterError
from ncdp.phy.waveform import SamplingModel, SamplingStrategy

logger = logging.getLogger(__name__)

# One LLR per code symbol.
LlrVector = np.ndarray


@dataclass(frozen=True)
class HypothesisSet:
    """All 2^k symbol vectors split by the parity of their +1 count."""
    k: int
    odd: np.ndarray
    even: np.ndarray

    @classmethod
    def for_users(cls, k: int) -> "HypothesisSet":
        return _hypotheses(k)


@lru_cache(maxsize=MAX_COLLISION_SIZE)
def _hypotheses(k: int) -> HypothesisSet:
    _check_k(k)
    vectors = np.array(list(itertools.product((-1.0, 1.0), repeat=k)))
    odd_mask = (vectors > 0).sum(axis=1) % 2 == 1
    odd, even = vectors[odd_mask], vectors[~odd_mask]
    odd.setflags(write=False)
    even.setflags(write=False)
    return HypothesisSet(k, odd, even)


def _check_k(k: int) -> None:
    if k < 1:
        raise ParameterError("collision size must be at least 1")
    if k > MAX_COLLISION_SIZE:
        raise ParameterError(
            f"collision size {k} exceeds the enumeration cap of {MAX_COLLISION_SIZE}"
        )


def _prepare(samples: np.ndarray, channels: np.ndarray, n0: float):
    if n0 <= 0:
        raise ParameterError(f"N0 must be positive, got {n0}")
    r = np.atleast_1d(np.asarray(samples, dtype=np.complex128))
    h = np.asarray(channels, dtype=np.complex128)
    if h.ndim == 1:
        h = np.broadcast_to(h, (r.size, h.size))
    if h.ndim != 2 or h.shape[0] != r.size:
        raise ParameterError(f"channels of shape {h.shape} do not match {r.size} samples")
    _check_k(h.shape[1])
    return r, h


def llr_xor(samples: np.ndarray, channels: np.ndarray, n0: float) -> LlrVector:
    """
    XOR LLR per symbol.

    ``channels`` is either one coefficient per user (shape (k,)) or one
    row per symbol (shape (N, k)) when frequency offsets rotate the
    channel across the burst.
    """
    r, h = _prepare(samples, channels, n0)
    hyp = HypothesisSet.for_users(h.shape[1])

    def log_likelihoods(vectors: np.ndarray) -> np.ndarray:
        means = h @ vectors.T
        return logsumexp(-np.abs(r[:, None] - means) ** 2 / (2.0 * n0), axis=1)

    llr = log_likelihoods(hyp.odd) - log_likelihoods(hyp.even)
    return np.clip(llr, -LLR_CLAMP, LLR_CLAMP)


def llr_xor_bruteforce(samples: np.ndarray, channels: np.ndarray, n0: float) -> LlrVector:
    """Direct ratio of summed likelihoods, without log-domain tricks."""
    r, h = _prepare(samples, channels, n0)
    k = h.shape[1]
    num = np.zeros(r.size)
    den = np.zeros(r.size)
    for d in itertools.product((-1.0, 1.0), repeat=k):
        d = np.array(d)
        lik = np.exp(-np.abs(r - h @ d) ** 2 / (2.0 * n0))
        if (d > 0).sum() % 2:
            num += lik
        else:
            den += lik
    return np.log(num) - np.log(den)


def llr_multi_sample(
    samples: np.ndarray,
    strategy: SamplingStrategy,
    model: SamplingModel,
    n0: float,
) -> LlrVector:
    """
    Combine several samples per symbol into one LLR.

    ``samples`` has shape (N, m), one column per instant of ``model``.

    IDEAL and MD take a single sample with the nominal channels and
    thermal noise only. ML averages the per-sample LLRs, each with its
    equivalent channels and the interference of its instant added to the
    noise. MS, US and EC average the samples first; MS keeps the nominal
    channels and pays for the mismatch in variance, US and EC use the
    averaged equivalent channels.
    """
    strategy = SamplingStrategy(strategy)
    if n0 <= 0:
        raise ParameterError(f"N0 must be positive, got {n0}")
    samples = np.asarray(samples)
    if samples.ndim == 1:
        samples = samples[:, None]
    m = samples.shape[1]
    if model.instants != m:
        raise ParameterError(f"{m} sampling instants but {model.instants} channel sets")

    if strategy in (SamplingStrategy.IDEAL, SamplingStrategy.MD):
        if m != 1:
            raise ParameterError(f"{strategy.value} uses one sample per symbol, got {m}")
        return llr_xor(samples[:, 0], model.nominal[0], n0)

    if strategy is SamplingStrategy.EC and model.equivalent is None:
        raise ParameterError("equivalent-channel combining needs the equivalent channels")
    channels = model.nominal if model.equivalent is None else model.equivalent
    if strategy is SamplingStrategy.ML:
        return np.mean([
            llr_xor(samples[:, i], channels[i], n0 * model.noise_corr[i, i] + model.isi_var[i])
            for i in range(m)
        ], axis=0)

    averaged = samples.mean(axis=1)
    variance = n0 * model.mean_noise_gain + model.mean_isi_var
    if strategy is SamplingStrategy.MS:
        return llr_xor(averaged, model.nominal.mean(axis=0), variance + model.mismatch_var)
    return llr_xor(averaged, channels.mean(axis=0), variance)
