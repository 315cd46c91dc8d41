"""
Per-frame state and the NCDP frame decoder.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Set, Tuple

import numpy as np

from ncdp.galois import FieldMatrix, determined_columns, rank, solve_or_reduce
from ncdp.mac.config import Decoder, ProtocolConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ActiveTerminal:
    terminal_id: int
    preamble: int
    message: Optional[np.ndarray] = None


@dataclass
class FrameState:
    """
    One frame at the receiver.

    ``decoded_rows`` flags the slots whose XOR equation is available;
    ``row_values`` holds the decoded equation payloads (GF(2^n) symbols)
    when messages are simulated, one row per slot.
    """
    active: Tuple[ActiveTerminal, ...]
    pattern: FieldMatrix
    decoded_rows: np.ndarray
    row_values: Optional[np.ndarray] = None
    recovered: Dict[int, Optional[np.ndarray]] = field(default_factory=dict)
    lost: Set[int] = field(default_factory=set)

    @classmethod
    def ideal(cls, active: Tuple[ActiveTerminal, ...], pattern: FieldMatrix) -> "FrameState":
        """Every slot with at least one transmitter decodes its equation."""
        return cls(active, pattern, pattern.nonzero_mask().any(axis=1))

    @property
    def n_tx(self) -> int:
        return self.pattern.cols


def decode_frame(frame: FrameState, cfg: ProtocolConfig) -> Tuple[Dict[int, Optional[np.ndarray]], Set[int]]:
    """
    Recover every message the decoded equations determine.

    Keys are column positions in ``frame.pattern``; values are the
    recovered symbol vectors, or ``None`` when only the equation structure
    is simulated.

    The full-rank decoder is all-or-nothing over the terminals that used
    at least one slot. A terminal with an all-zero column sent nothing,
    is lost on its own and does not block the rest of the frame.
    """
    n_tx = frame.n_tx
    if n_tx == 0:
        return {}, set()
    rows = np.flatnonzero(frame.decoded_rows)
    system = frame.pattern.select_rows(rows)

    recovered: Dict[int, Optional[np.ndarray]]
    transmitting = int(frame.pattern.nonzero_mask().any(axis=0).sum())
    if cfg.decoder is Decoder.FULL_RANK and rank(system) < transmitting:
        recovered = {}
    elif frame.row_values is None:
        recovered = {i: None for i in sorted(determined_columns(system))}
    else:
        result = solve_or_reduce(system, frame.row_values[rows])
        recovered = dict(result.recovered)

    unresolved = set(range(n_tx)) - set(recovered)
    frame.recovered = recovered
    frame.lost = unresolved
    return recovered, unresolved
