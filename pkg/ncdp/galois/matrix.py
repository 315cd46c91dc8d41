"""
Linear algebra over GF(2^n).

Rows of a coefficient matrix are slot equations and columns are active
terminals, so entry (j, i) is the coefficient terminal i used in slot j.
Gaussian elimination recovers every variable the system determines
uniquely, which includes everything clean-burst peeling can reach.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

import numpy as np

from ncdp.exceptions import DimensionError, ParameterError, SpecMismatchError
from ncdp.galois.field import FieldSpec, get_field

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FieldMatrix:
    """Immutable S x N_tx matrix with entries in GF(2^n)."""
    spec: FieldSpec
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.int64, copy=True)
        if entries.ndim != 2:
            if entries.size == 0:
                entries = entries.reshape(0, 0)
            else:
                raise DimensionError(f"matrix entries must be 2-D, got shape {entries.shape}")
        if entries.size and (entries.min() < 0 or entries.max() >= self.spec.order):
            raise ParameterError(f"entries outside {self.spec}")
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)

    @property
    def rows(self) -> int:
        return int(self.entries.shape[0])

    @property
    def cols(self) -> int:
        return int(self.entries.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    def nonzero_mask(self) -> np.ndarray:
        return self.entries != 0

    def select_rows(self, rows: Sequence[int]) -> "FieldMatrix":
        return FieldMatrix(self.spec, self.entries[np.asarray(rows, dtype=np.int64)].reshape(-1, self.cols))

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[int]], spec: Optional[FieldSpec] = None) -> "FieldMatrix":
        return cls(spec or FieldSpec(8), np.array([list(r) for r in rows], dtype=np.int64))

    @classmethod
    def zeros(cls, rows: int, cols: int, spec: Optional[FieldSpec] = None) -> "FieldMatrix":
        return cls(spec or FieldSpec(8), np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, size: int, spec: Optional[FieldSpec] = None) -> "FieldMatrix":
        return cls(spec or FieldSpec(8), np.eye(size, dtype=np.int64))


@dataclass
class SolveResult:
    """Outcome of solving (or partially solving) a frame's equations."""
    recovered: Dict[int, np.ndarray] = field(default_factory=dict)
    unresolved: Set[int] = field(default_factory=set)
    rank: int = 0

    @property
    def full_rank(self) -> bool:
        return not self.unresolved


def _eliminate(spec: FieldSpec, work: np.ndarray, n_vars: int) -> Tuple[np.ndarray, List[int]]:
    """In-place reduced row echelon form on the first ``n_vars`` columns."""
    gf = get_field(spec)
    n_rows = work.shape[0]
    pivots: List[int] = []
    r = 0
    for c in range(n_vars):
        if r >= n_rows:
            break
        candidates = np.flatnonzero(work[r:, c])
        if candidates.size == 0:
            continue
        p = r + int(candidates[0])
        if p != r:
            work[[r, p]] = work[[p, r]]
        work[r] = gf.mul(work[r], gf.inv(work[r, c]))
        others = np.flatnonzero(work[:, c])
        others = others[others != r]
        if others.size:
            work[others] ^= gf.mul(work[others, c][:, None], work[r][None, :])
        pivots.append(c)
        r += 1
    return work, pivots


def rref(m: FieldMatrix) -> Tuple[FieldMatrix, List[int]]:
    """Reduced row echelon form and its pivot columns."""
    work, pivots = _eliminate(m.spec, m.entries.copy(), m.cols)
    return FieldMatrix(m.spec, work), pivots


def rank(m: FieldMatrix) -> int:
    """Rank over GF(2^n); 0 for the all-zero matrix."""
    if m.rows == 0 or m.cols == 0:
        return 0
    return len(rref(m)[1])


def _determined(reduced: np.ndarray, pivots: List[int], n_vars: int) -> List[Tuple[int, int]]:
    """(row, column) of every pivot whose row has no free-variable entry."""
    free = np.ones(n_vars, dtype=bool)
    free[pivots] = False
    coeffs = reduced[:, :n_vars]
    out = []
    for row, col in enumerate(pivots):
        if not np.any(coeffs[row, free]):
            out.append((row, col))
    return out


def determined_columns(m: FieldMatrix) -> Set[int]:
    """Variables uniquely fixed by the system, without solving for values."""
    if m.rows == 0 or m.cols == 0:
        return set()
    reduced, pivots = rref(m)
    return {col for _, col in _determined(reduced.entries, pivots, m.cols)}


def solve_or_reduce(m: FieldMatrix, rhs: Union[np.ndarray, Sequence[Sequence[int]]]) -> SolveResult:
    """
    Solve m @ x = rhs over GF(2^n), or recover what the system determines.

    ``rhs`` holds one length-L GF(2^n) vector per row of ``m``. With rank
    N_tx every message comes back; otherwise each variable whose RREF row
    is a unit vector is recovered and the rest are unresolved.
    """
    rhs_arr = np.asarray(rhs, dtype=np.int64)
    if rhs_arr.ndim == 1 and m.rows == rhs_arr.shape[0]:
        rhs_arr = rhs_arr.reshape(-1, 1)
    if rhs_arr.size == 0:
        rhs_arr = rhs_arr.reshape(m.rows, -1) if m.rows else np.zeros((0, 0), dtype=np.int64)
    if rhs_arr.ndim != 2 or rhs_arr.shape[0] != m.rows:
        raise DimensionError(
            f"{m.rows} equations but right-hand side has shape {rhs_arr.shape}"
        )
    if rhs_arr.size and (rhs_arr.min() < 0 or rhs_arr.max() >= m.spec.order):
        raise SpecMismatchError(f"right-hand side symbols outside {m.spec}")

    if m.rows == 0 or m.cols == 0:
        return SolveResult(recovered={}, unresolved=set(range(m.cols)), rank=0)

    work = np.concatenate([m.entries, rhs_arr], axis=1)
    reduced, pivots = _eliminate(m.spec, work, m.cols)

    inconsistent = np.any(reduced[len(pivots):, m.cols:], axis=1)
    if np.any(inconsistent):
        logger.debug("system has %d inconsistent rows", int(np.count_nonzero(inconsistent)))

    recovered = {col: reduced[row, m.cols:].copy() for row, col in _determined(reduced, pivots, m.cols)}
    unresolved = set(range(m.cols)) - set(recovered)
    return SolveResult(recovered=recovered, unresolved=unresolved, rank=len(pivots))


def peel_clean(m: FieldMatrix, rhs: Optional[np.ndarray] = None) -> Dict[int, Optional[np.ndarray]]:
    """
    Clean-burst peeling: repeatedly solve equations with a single unknown
    and substitute the result into the other equations.

    Returns the recovered terminals; values are ``None`` when ``rhs`` is
    omitted.
    """
    gf = get_field(m.spec)
    coeffs = m.entries.copy()
    values = None if rhs is None else np.array(rhs, dtype=np.int64).reshape(m.rows, -1)
    if values is not None and values.shape[0] != m.rows:
        raise DimensionError(f"{m.rows} equations but {values.shape[0]} right-hand sides")

    recovered: Dict[int, Optional[np.ndarray]] = {}
    progress = True
    while progress:
        progress = False
        singles = np.flatnonzero(np.count_nonzero(coeffs, axis=1) == 1)
        for row in singles:
            nz = np.flatnonzero(coeffs[row])
            if nz.size != 1:
                continue
            col = int(nz[0])
            value = None
            if values is not None:
                value = gf.div(values[row], coeffs[row, col])
                users = np.flatnonzero(coeffs[:, col])
                values[users] ^= gf.mul(coeffs[users, col][:, None], value[None, :])
            recovered[col] = value
            coeffs[:, col] = 0
            progress = True
    return recovered
