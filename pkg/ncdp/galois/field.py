"""
Arithmetic in GF(2^n).

A string of n bits is an element of GF(2^n): the bits are the coefficients
of a polynomial of degree lower than n. Addition is bitwise XOR and
multiplication is polynomial multiplication modulo an irreducible
polynomial. The vectorised ``GaloisField`` works on numpy arrays through
log/antilog tables; the scalar ``FieldElement`` wraps one value for
readable call sites and tests.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Union

import numpy as np

from ncdp.exceptions import FieldZeroDivisionError, ParameterError, SpecMismatchError

ArrayLike = Union[int, np.ndarray]

MAX_FIELD_BITS = 16


def clmul(a: int, b: int) -> int:
    """Carry-less product of two bit polynomials."""
    result = 0
    while b:
        if b & 1:
            result ^= a
        a <<= 1
        b >>= 1
    return result


def polymod(a: int, b: int) -> int:
    """Remainder of bit polynomial ``a`` divided by ``b``."""
    if b == 0:
        raise FieldZeroDivisionError("polynomial division by zero")
    deg_b = b.bit_length() - 1
    while a and a.bit_length() - 1 >= deg_b:
        a ^= b << (a.bit_length() - 1 - deg_b)
    return a


def is_irreducible(poly: int) -> bool:
    """Exhaustive divisor check; fine for degrees up to 16."""
    degree = poly.bit_length() - 1
    if degree < 1:
        return False
    for d in range(1, degree // 2 + 1):
        for divisor in range(1 << d, 1 << (d + 1)):
            if polymod(poly, divisor) == 0:
                return False
    return True


@lru_cache(maxsize=None)
def default_reduction_poly(n: int) -> int:
    """0x11B for GF(2^8), otherwise the smallest irreducible of degree n."""
    if not 1 <= n <= MAX_FIELD_BITS:
        raise ParameterError(f"field exponent must be in [1, {MAX_FIELD_BITS}], got {n}")
    if n == 8:
        return 0x11B
    for poly in range(1 << n, 1 << (n + 1)):
        if is_irreducible(poly):
            return poly
    raise ParameterError(f"no irreducible polynomial of degree {n}")  # unreachable


@dataclass(frozen=True)
class FieldSpec:
    """
    GF(2^n) with a given reduction polynomial.

    ``reduction_poly=0`` selects the default polynomial for ``n``.
    """
    n: int
    reduction_poly: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.n, (int, np.integer)) or not 1 <= self.n <= MAX_FIELD_BITS:
            raise ParameterError(f"field exponent must be in [1, {MAX_FIELD_BITS}], got {self.n}")
        if self.reduction_poly == 0:
            object.__setattr__(self, "reduction_poly", default_reduction_poly(int(self.n)))
        poly = int(self.reduction_poly)
        if poly.bit_length() - 1 != self.n:
            raise ParameterError(
                f"reduction polynomial {poly:#x} must have degree {self.n}"
            )
        if not is_irreducible(poly):
            raise ParameterError(f"reduction polynomial {poly:#x} is reducible over GF(2)")

    @property
    def order(self) -> int:
        return 1 << self.n

    def __str__(self) -> str:
        return f"GF(2^{self.n})/{self.reduction_poly:#x}"


@dataclass(frozen=True)
class FieldElement:
    """One element of GF(2^n)."""
    value: int
    spec: FieldSpec = field(default_factory=lambda: FieldSpec(8))

    def __post_init__(self) -> None:
        if not 0 <= int(self.value) < self.spec.order:
            raise ParameterError(f"{self.value} is not an element of {self.spec}")
        object.__setattr__(self, "value", int(self.value))

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return add(self, other)

    __sub__ = __add__

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return mul(self, other)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return mul(self, inv(other))

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value


class GaloisField:
    """
    Vectorised GF(2^n) arithmetic.

    Tables are indexed by element value; ``exp`` is doubled in length so
    that ``exp[log[a] + log[b]]`` never needs a modulo.
    """

    def __init__(self, spec: FieldSpec) -> None:
        self.spec = spec
        self.n = spec.n
        self.order = spec.order
        self.generator = self._find_generator()

        q1 = self.order - 1
        exp = np.zeros(2 * q1, dtype=np.int64)
        log = np.zeros(self.order, dtype=np.int64)
        x = 1
        for i in range(q1):
            exp[i] = x
            log[x] = i
            x = self._mulmod(x, self.generator)
        exp[q1:] = exp[:q1]
        self.exp = exp
        self.log = log

    def _mulmod(self, a: int, b: int) -> int:
        return polymod(clmul(a, b), self.spec.reduction_poly)

    def _powmod(self, a: int, e: int) -> int:
        result = 1
        while e:
            if e & 1:
                result = self._mulmod(result, a)
            a = self._mulmod(a, a)
            e >>= 1
        return result

    def _find_generator(self) -> int:
        q1 = self.order - 1
        if q1 == 1:
            return 1
        primes = [p for p in range(2, q1 + 1) if q1 % p == 0 and all(p % d for d in range(2, int(p ** 0.5) + 1))]
        for g in range(2, self.order):
            if all(self._powmod(g, q1 // p) != 1 for p in primes):
                return g
        raise ParameterError(f"{self.spec} has no primitive element")  # unreachable for a field

    # Vectorised operations -------------------------------------------------

    def add(self, a: ArrayLike, b: ArrayLike) -> np.ndarray:
        return np.bitwise_xor(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64))

    sub = add

    def mul(self, a: ArrayLike, b: ArrayLike) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        product = self.exp[self.log[a] + self.log[b]]
        return np.where((a != 0) & (b != 0), product, 0)

    def inv(self, a: ArrayLike) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if np.any(a == 0):
            raise FieldZeroDivisionError("zero has no multiplicative inverse")
        return self.exp[(self.order - 1) - self.log[a]]

    def div(self, a: ArrayLike, b: ArrayLike) -> np.ndarray:
        return self.mul(a, self.inv(b))

    def power(self, a: ArrayLike, e: int) -> np.ndarray:
        a = np.asarray(a, dtype=np.int64)
        if e < 0:
            return self.power(self.inv(a), -e)
        if e == 0:
            return np.ones_like(a)
        result = self.exp[(self.log[a] * e) % (self.order - 1)]
        return np.where(a != 0, result, 0)

    def random(self, rng: np.random.Generator, size: Union[int, tuple], nonzero: bool = False) -> np.ndarray:
        low = 1 if nonzero else 0
        return rng.integers(low, self.order, size=size, dtype=np.int64)

    def element(self, value: int) -> FieldElement:
        return FieldElement(value, self.spec)

    def __repr__(self) -> str:
        return f"GaloisField({self.spec})"


@lru_cache(maxsize=None)
def get_field(spec: FieldSpec) -> GaloisField:
    """Shared, immutable table set for ``spec``."""
    return GaloisField(spec)


def _check(a: FieldElement, b: FieldElement) -> GaloisField:
    if a.spec != b.spec:
        raise SpecMismatchError(f"operands from {a.spec} and {b.spec}")
    return get_field(a.spec)


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    """Coefficient-wise sum (bitwise XOR)."""
    _check(a, b)
    return FieldElement(a.value ^ b.value, a.spec)


def mul(a: FieldElement, b: FieldElement) -> FieldElement:
    """Product modulo the reduction polynomial."""
    gf = _check(a, b)
    return FieldElement(int(gf.mul(a.value, b.value)), a.spec)


def inv(a: FieldElement) -> FieldElement:
    """Multiplicative inverse; zero raises FieldZeroDivisionError."""
    if a.value == 0:
        raise FieldZeroDivisionError(f"zero has no inverse in {a.spec}")
    return FieldElement(int(get_field(a.spec).inv(a.value)), a.spec)


def bits_to_symbols(bits: np.ndarray, n: int) -> np.ndarray:
    """Group a bit vector of length n*L into L GF(2^n) symbols, MSB first."""
    bits = np.asarray(bits, dtype=np.int64).ravel()
    if bits.size % n:
        raise ParameterError(f"{bits.size} bits do not split into {n}-bit symbols")
    weights = 1 << np.arange(n - 1, -1, -1, dtype=np.int64)
    return bits.reshape(-1, n) @ weights


def symbols_to_bits(symbols: np.ndarray, n: int) -> np.ndarray:
    """Inverse of ``bits_to_symbols``."""
    symbols = np.asarray(symbols, dtype=np.int64).ravel()
    shifts = np.arange(n - 1, -1, -1, dtype=np.int64)
    return ((symbols[:, None] >> shifts[None, :]) & 1).astype(np.uint8).ravel()
