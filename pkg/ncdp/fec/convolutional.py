"""
Zero-terminated rate-1/2 convolutional code with soft Viterbi decoding.

Generators are given in octal with the most significant bit acting on
the current input. Code bits are interleaved per trellis step as
(c1, c2), so N = 2 (K + tail).
"""

import logging
from functools import lru_cache
from typing import Sequence, Tuple

import numpy as np

from ncdp.exceptions import ParameterError
from ncdp.fec.base import CodeSpec
from ncdp.fec.registry import CodeRegistry

logger = logging.getLogger(__name__)

DEFAULT_GENERATORS = (0o133, 0o171)
CONSTRAINT_LENGTH = 7


@lru_cache(maxsize=8)
def _trellis(generators: Tuple[int, ...], constraint_length: int):
    """Output bits for every (state, input) and the predecessor layout."""
    memory = constraint_length - 1
    n_states = 1 << memory
    states = np.arange(n_states)
    outputs = np.zeros((n_states, 2, len(generators)), dtype=np.int8)
    for bit in (0, 1):
        register = (bit << memory) | states
        for g, gen in enumerate(generators):
            outputs[:, bit, g] = np.array([bin(int(x) & gen).count("1") & 1 for x in register])
    # next state = register >> 1; predecessors of ns are ((ns << 1) & mask) | x
    next_states = np.arange(n_states)
    prev = np.stack([((next_states << 1) & (n_states - 1)) | x for x in (0, 1)], axis=1)
    inputs = next_states >> (memory - 1)
    return outputs, prev, inputs


class ConvolutionalCode:
    """
    Terminated convolutional code, constraint length 7 by default.
    """

    def __init__(
        self,
        info_bits: int = 744,
        tail_bits: int = 8,
        generators: Sequence[int] = DEFAULT_GENERATORS,
        constraint_length: int = CONSTRAINT_LENGTH,
    ) -> None:
        if info_bits < 1:
            raise ParameterError(f"info_bits must be positive, got {info_bits}")
        if tail_bits < constraint_length - 1:
            raise ParameterError(
                f"{tail_bits} tail bits cannot flush a memory of {constraint_length - 1}"
            )
        self.info_bits = info_bits
        self.tail_bits = tail_bits
        self.generators = tuple(int(g) for g in generators)
        self.constraint_length = constraint_length
        self.code_bits = len(self.generators) * (info_bits + tail_bits)
        self._taps = np.array(
            [[(g >> (constraint_length - 1 - j)) & 1 for j in range(constraint_length)] for g in self.generators],
            dtype=np.int64,
        )

    @property
    def rate(self) -> float:
        return self.info_bits / self.code_bits

    def encode(self, bits: np.ndarray) -> np.ndarray:
        """Encode one message (K,) or a batch (B, K)."""
        u = np.asarray(bits, dtype=np.int64)
        single = u.ndim == 1
        u = np.atleast_2d(u)
        if u.shape[1] != self.info_bits:
            raise ParameterError(f"expected {self.info_bits} information bits, got {u.shape[1]}")
        steps = self.info_bits + self.tail_bits
        padded = np.concatenate([u, np.zeros((u.shape[0], self.tail_bits), dtype=np.int64)], axis=1)
        out = np.empty((u.shape[0], steps, len(self.generators)), dtype=np.uint8)
        for g, taps in enumerate(self._taps):
            for b in range(u.shape[0]):
                out[b, :, g] = np.convolve(padded[b], taps)[:steps] % 2
        out = out.reshape(u.shape[0], -1)
        return out[0] if single else out

    def decode_soft(self, llrs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """
        Soft Viterbi decoding of one LLR vector (N,) or a batch (B, N).

        Returns the information bits and, per codeword, the path metric of
        the surviving path divided by its maximum 0.5 * sum |LLR|; 1.0 means
        every code bit agrees with the channel decision.
        """
        L = np.asarray(llrs, dtype=np.float64)
        single = L.ndim == 1
        L = np.atleast_2d(L)
        if L.shape[1] != self.code_bits:
            raise ParameterError(f"expected {self.code_bits} LLRs, got {L.shape[1]}")
        n_out = len(self.generators)
        steps = self.info_bits + self.tail_bits
        batch = L.shape[0]
        outputs, prev, inputs = _trellis(self.generators, self.constraint_length)
        n_states = prev.shape[0]
        signs = 2.0 * outputs - 1.0  # (state, bit, g)

        L = L.reshape(batch, steps, n_out)
        metric = np.full((batch, n_states), -np.inf)
        metric[:, 0] = 0.0
        decisions = np.empty((steps, batch, n_states), dtype=np.uint8)
        for t in range(steps):
            # branch metric of the transition prev[ns, x] -> ns with input inputs[ns]
            branch = 0.5 * np.einsum("bg,sxg->bsx", L[:, t], signs[prev, inputs[:, None]])
            candidates = metric[:, prev] + branch
            choice = np.argmax(candidates, axis=2)
            metric = np.take_along_axis(candidates, choice[..., None], axis=2)[..., 0]
            decisions[t] = choice
            metric -= metric.max(axis=1, keepdims=True)

        # terminated trellis ends in state 0
        state = np.zeros(batch, dtype=np.int64)
        bits = np.empty((batch, steps), dtype=np.uint8)
        for t in range(steps - 1, -1, -1):
            bits[:, t] = inputs[state]
            x = decisions[t, np.arange(batch), state]
            state = prev[state, x]

        info = bits[:, : self.info_bits]
        reliability = self._path_agreement(L.reshape(batch, -1), info)
        if single:
            return info[0], reliability[0]
        return info, reliability

    def _path_agreement(self, L: np.ndarray, info: np.ndarray) -> np.ndarray:
        code = np.atleast_2d(self.encode(info))
        total = 0.5 * np.abs(L).sum(axis=1)
        agree = 0.5 * (L * (2.0 * code - 1.0)).sum(axis=1)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(total > 0, agree / np.where(total > 0, total, 1.0), 0.0)


def _build_convolutional(spec: CodeSpec) -> ConvolutionalCode:
    return ConvolutionalCode(info_bits=spec.info_bits, tail_bits=spec.tail_bits)


CodeRegistry.register("conv-k7-133-171", _build_convolutional)
