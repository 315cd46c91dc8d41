"""Orthogonal Walsh-Hadamard preambles used for node identification."""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import hadamard

from ncdp.config import PREAMBLE_LENGTH
from ncdp.exceptions import ParameterError


@dataclass(frozen=True)
class PreambleBank:
    """
    Rows 1..length-1 of a Sylvester Hadamard matrix.

    Row 0 (all ones) is reserved, so ``word(mu)`` is defined for
    ``1 <= mu <= length - 1``.
    """
    words: np.ndarray

    def __post_init__(self) -> None:
        words = np.array(self.words, dtype=np.float64)
        if words.ndim != 2 or words.shape[0] != words.shape[1] - 1:
            raise ParameterError(f"expected (L-1) x L preamble words, got {words.shape}")
        words.setflags(write=False)
        object.__setattr__(self, "words", words)

    @property
    def length(self) -> int:
        return int(self.words.shape[1])

    @property
    def size(self) -> int:
        return int(self.words.shape[0])

    @property
    def indices(self) -> range:
        return range(1, self.size + 1)

    def word(self, mu: int) -> np.ndarray:
        if not 1 <= mu <= self.size:
            raise ParameterError(f"preamble index must be in [1, {self.size}], got {mu}")
        return self.words[mu - 1]

    def correlation_matrix(self) -> np.ndarray:
        return self.words @ self.words.T

    @classmethod
    def walsh_hadamard(cls, length: int = PREAMBLE_LENGTH) -> "PreambleBank":
        return _bank(length)


@lru_cache(maxsize=8)
def _bank(length: int) -> PreambleBank:
    if length < 2 or length & (length - 1):
        raise ParameterError(f"preamble length must be a power of two, got {length}")
    return PreambleBank(hadamard(length)[1:].astype(np.float64))
