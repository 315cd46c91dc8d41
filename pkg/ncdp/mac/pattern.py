"""
Access patterns: which slots a terminal uses and with which coefficient.

A terminal's column is a pure function of its generator seed, so the
receiver rebuilds the pattern from the identified preambles. The seed
mixes the preamble index with a frame key known at both ends.
"""

import logging
from typing import Sequence

import numpy as np

from ncdp.exceptions import ParameterError
from ncdp.galois import FieldMatrix
from ncdp.mac.config import CoefficientPolicy, ProtocolConfig
from ncdp.utils.rng import splitmix64, uniform_from_bits

logger = logging.getLogger(__name__)

_LOW32 = np.uint64(0xFFFFFFFF)


def terminal_seeds(preambles: Sequence[int], frame_key: int) -> np.ndarray:
    """Generator seeds for the given preamble indices in one frame."""
    mixed = splitmix64(np.array([frame_key], dtype=np.uint64), 1)[0, 0]
    return np.asarray(preambles, dtype=np.uint64) ^ mixed


def _nonzero_coefficients(words: np.ndarray, order: int) -> np.ndarray:
    return 1 + ((words & _LOW32) % np.uint64(order - 1)).astype(np.int64)


def generate_pattern(seeds: Sequence[int], cfg: ProtocolConfig) -> FieldMatrix:
    """
    S x N_tx coefficient matrix; column i is drawn from the first S
    generator outputs for ``seeds[i]``.
    """
    seeds = np.asarray(seeds, dtype=np.uint64).ravel()
    spec = cfg.field_spec
    S, n_tx = cfg.slots, seeds.size
    if cfg.d is not None and cfg.d > S:
        raise ParameterError(f"replicas exceed slots: d={cfg.d} > S={S}")
    if n_tx == 0:
        return FieldMatrix.zeros(S, 0, spec)

    words = splitmix64(seeds, S)
    if cfg.policy is CoefficientPolicy.UNIFORM:
        cols = (words & np.uint64(spec.order - 1)).astype(np.int64)
    elif cfg.policy is CoefficientPolicy.FIXED_PROBABILITY:
        active = uniform_from_bits(words) < cfg.p
        cols = np.where(active, _nonzero_coefficients(words, spec.order), 0)
    else:
        order = np.argsort(words, axis=1, kind="stable")[:, : cfg.d]
        coeffs = _nonzero_coefficients(splitmix64(seeds, cfg.d, offset=S), spec.order)
        cols = np.zeros((n_tx, S), dtype=np.int64)
        np.put_along_axis(cols, order, coeffs, axis=1)
    return FieldMatrix(spec, cols.T)


def replica_pattern(seeds: Sequence[int], slots: int, replicas: int) -> np.ndarray:
    """Boolean S x N_tx pattern of ``replicas`` distinct slots per terminal."""
    if replicas > slots:
        raise ParameterError(f"replicas exceed slots: d={replicas} > S={slots}")
    seeds = np.asarray(seeds, dtype=np.uint64).ravel()
    pattern = np.zeros((slots, seeds.size), dtype=bool)
    if seeds.size:
        chosen = np.argsort(splitmix64(seeds, slots), axis=1, kind="stable")[:, :replicas]
        np.put_along_axis(pattern.T, chosen, True, axis=1)
    return pattern
