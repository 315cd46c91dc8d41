from dataclasses import dataclass
from typing import Protocol, Tuple, runtime_checkable

import numpy as np


@dataclass(frozen=True)
class CodeSpec:
    """Named GF(2)-linear code family plus its block sizes."""
    kind: str = "conv-k7-133-171"
    info_bits: int = 744
    tail_bits: int = 8

    @property
    def code_bits(self) -> int:
        return 2 * (self.info_bits + self.tail_bits)

    @property
    def rate(self) -> float:
        return self.info_bits / self.code_bits


@runtime_checkable
class ChannelCode(Protocol):
    """
    What the link needs from a channel code.

    ``decode_soft`` takes LLRs with positive values favouring bit 1 and
    returns the decoded information bits plus a reliability figure.
    """
    info_bits: int
    code_bits: int

    @property
    def rate(self) -> float: ...

    def encode(self, bits: np.ndarray) -> np.ndarray: ...

    def decode_soft(self, llrs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]: ...
