"""
Closed-form throughput of NCDP with uniform GF(2^n) coefficients.

With Poisson(G S) active terminals in a frame of S slots, a frame is
decoded when the S x N_tx coefficient matrix has full column rank.
"""

import itertools
import math

import numpy as np
from scipy.stats import poisson

from ncdp.exceptions import ParameterError


def _check_inputs(G: float, S: int) -> None:
    if G < 0:
        raise ParameterError(f"load must be non-negative, got {G}")
    if S < 1:
        raise ParameterError(f"slots must be >= 1, got {S}")


def prob_active_le_S(G: float, S: int) -> float:
    """P(N_tx <= S) for N_tx ~ Poisson(G S), zero terminals included."""
    _check_inputs(G, S)
    if G == 0:
        return 1.0
    return float(np.exp(poisson.logcdf(S, G * S)))


def prob_full_rank(S: int, n_tx: int, n: int) -> float:
    """
    Probability that a uniform random S x n_tx matrix over GF(2^n) has
    rank n_tx.

    Defined for every n_tx >= 0: more terminals than slots is a valid
    input and returns 0.0 rather than raising, since the rank cannot
    exceed S.
    """
    if n < 1:
        raise ParameterError(f"field exponent must be >= 1, got {n}")
    if n_tx > S:
        return 0.0
    k = np.arange(n_tx)
    return float(np.exp(np.sum(np.log1p(-(2.0 ** (-n * (S - k).astype(np.float64)))))))


def _poisson_pmf(m: np.ndarray, mean: float) -> np.ndarray:
    return np.exp(poisson.logpmf(m, mean))


def throughput_analytic(G: float, S: int, n: int) -> float:
    """Expected messages delivered per slot when only full-rank frames decode."""
    _check_inputs(G, S)
    if G == 0:
        return 0.0
    m = np.arange(S)
    full_rank = np.array([prob_full_rank(S, int(x) + 1, n) for x in m])
    return float(G * np.sum(_poisson_pmf(m, G * S) * full_rank))


def throughput_limit(G: float, S: int) -> float:
    """Large-field limit of ``throughput_analytic``: G P(N_tx <= S - 1)."""
    _check_inputs(G, S)
    if G == 0:
        return 0.0
    return float(G * np.exp(poisson.logcdf(S - 1, G * S)))


def sparsity_threshold(S: int) -> float:
    """Smallest transmit probability that still gives full rank w.h.p.: ln(S)/S."""
    if S < 2:
        raise ParameterError(f"threshold needs S >= 2, got {S}")
    return math.log(S) / S


def expected_replicas(S: int, p: float) -> float:
    if not 0.0 <= p <= 1.0:
        raise ParameterError(f"p must be in [0, 1], got {p}")
    return S * p


def slotted_aloha_throughput(G: float) -> float:
    return float(G * np.exp(-G))


def full_rank_bruteforce(S: int, n_tx: int, n: int) -> float:
    """Fraction of all S x n_tx matrices over GF(2^n) with full column rank."""
    from ncdp.galois import FieldMatrix, FieldSpec, rank

    spec = FieldSpec(n)
    cells = S * n_tx
    if spec.order ** cells > 1 << 20:
        raise ParameterError("enumeration too large; use prob_full_rank")
    if n_tx == 0:
        return 1.0
    full = 0
    total = 0
    for entries in itertools.product(range(spec.order), repeat=cells):
        total += 1
        if rank(FieldMatrix(spec, np.array(entries).reshape(S, n_tx))) == n_tx:
            full += 1
    return full / total
