"""
CRC error detection.

Registers start at zero and no final XOR is applied, which keeps the
CRC linear over GF(2): crc(u ^ v) == crc(u) ^ crc(v). A burst that
decodes to the XOR of several CRC-protected messages therefore still
passes the check.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ncdp.exceptions import ParameterError


@dataclass(frozen=True)
class CrcSpec:
    """Generator polynomial without its leading term, and register width."""
    width: int
    poly: int
    name: str = ""

    def __post_init__(self) -> None:
        if self.width < 1:
            raise ParameterError(f"CRC width must be positive, got {self.width}")
        if not 0 < self.poly < (1 << self.width):
            raise ParameterError(f"polynomial {self.poly:#x} does not fit in {self.width} bits")


CRC16 = CrcSpec(16, 0x1021, "crc-16/0x1021")
CRC8 = CrcSpec(8, 0x07, "crc-8/0x07")


@lru_cache(maxsize=32)
def _contributions(spec: CrcSpec, length: int) -> np.ndarray:
    """(length, width) matrix: CRC of a message with a single bit set."""
    mask = (1 << spec.width) - 1
    rows = np.zeros((length, spec.width), dtype=np.uint8)
    # last message bit contributes x^width mod P; each earlier bit one more power of x
    rem = spec.poly
    shifts = np.arange(spec.width - 1, -1, -1)
    for i in range(length - 1, -1, -1):
        rows[i] = (rem >> shifts) & 1
        top = rem >> (spec.width - 1)
        rem = ((rem << 1) & mask) ^ (spec.poly if top else 0)
    rows.setflags(write=False)
    return rows


def crc_compute(bits: np.ndarray, spec: CrcSpec = CRC16) -> np.ndarray:
    """CRC bits (MSB first) of one message (L,) or a batch (B, L)."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape[-1] == 0:
        return np.zeros(bits.shape[:-1] + (spec.width,), dtype=np.uint8)
    return ((bits @ _contributions(spec, bits.shape[-1])) % 2).astype(np.uint8)


def crc_append(bits: np.ndarray, spec: CrcSpec = CRC16) -> np.ndarray:
    bits = np.asarray(bits).astype(np.uint8)
    return np.concatenate([bits, crc_compute(bits, spec)], axis=-1)


def crc_check(bits: np.ndarray, spec: CrcSpec = CRC16):
    """True where the trailing ``width`` bits are the CRC of the rest."""
    bits = np.asarray(bits, dtype=np.int64)
    if bits.shape[-1] < spec.width:
        raise ParameterError(f"{bits.shape[-1]} bits cannot carry a {spec.width}-bit CRC")
    ok = np.all(crc_compute(bits[..., : -spec.width], spec) == bits[..., -spec.width:], axis=-1)
    return bool(ok) if np.ndim(ok) == 0 else ok
