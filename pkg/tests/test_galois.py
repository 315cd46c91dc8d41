import itertools

import numpy as np
import pytest

from ncdp.exceptions import DimensionError, FieldZeroDivisionError, ParameterError, SpecMismatchError
from ncdp.galois import (
    FieldElement,
    FieldMatrix,
    FieldSpec,
    add,
    bits_to_symbols,
    default_reduction_poly,
    determined_columns,
    get_field,
    inv,
    is_irreducible,
    mul,
    peel_clean,
    rank,
    solve_or_reduce,
    symbols_to_bits,
)

GF256 = FieldSpec(8)


def el(value, spec=GF256):
    return FieldElement(value, spec)


class TestFieldSpec:

    def test_default_polynomials(self):
        assert GF256.reduction_poly == 0x11B
        assert FieldSpec(1).reduction_poly == 0b10
        assert FieldSpec(2).reduction_poly == 0b111
        assert FieldSpec(4).reduction_poly == 0b10011

    def test_reducible_polynomial_rejected(self):
        # x^2 + 1 = (x + 1)^2
        with pytest.raises(ParameterError):
            FieldSpec(2, 0b101)

    def test_degree_must_match(self):
        with pytest.raises(ParameterError):
            FieldSpec(4, 0x11B)

    @pytest.mark.parametrize("n", [0, 17])
    def test_exponent_range(self, n):
        with pytest.raises(ParameterError):
            FieldSpec(n)

    def test_is_irreducible(self):
        assert is_irreducible(0x11B)
        assert not is_irreducible(0x100)
        assert default_reduction_poly(8) == 0x11B

    def test_element_range(self):
        with pytest.raises(ParameterError):
            FieldElement(256)
        with pytest.raises(ParameterError):
            FieldElement(2, FieldSpec(1))


class TestScalarArithmetic:

    def test_add_examples(self):
        assert add(el(0x53), el(0x53)).value == 0
        assert add(el(0x53), el(0)).value == 0x53
        assert add(el(0x53), el(0xCA)).value == 0x99

    def test_mul_examples(self):
        assert mul(el(0x57), el(1)).value == 0x57
        assert mul(el(0x02), el(0x80)).value == 0x1B
        assert mul(el(0x57), el(0)).value == 0
        # classic AES example
        assert mul(el(0x57), el(0x83)).value == 0xC1

    def test_inverse_examples(self):
        assert inv(el(1)).value == 1
        assert inv(FieldElement(1, FieldSpec(1))).value == 1
        for a in range(1, 256):
            assert mul(el(a), inv(el(a))).value == 1
            assert inv(inv(el(a))).value == a

    def test_inverse_of_zero(self):
        with pytest.raises(FieldZeroDivisionError):
            inv(el(0))
        with pytest.raises(ZeroDivisionError):
            el(3) / el(0)

    def test_spec_mismatch(self):
        with pytest.raises(SpecMismatchError):
            add(el(1), FieldElement(1, FieldSpec(4)))
        with pytest.raises(SpecMismatchError):
            mul(el(1), FieldElement(1, FieldSpec(4)))

    def test_operators(self):
        a, b = el(0x53), el(0xCA)
        assert (a + b) == add(a, b)
        assert (a - b) == add(a, b)
        assert (a * b) / b == a
        assert not el(0)
        assert int(a) == 0x53


@pytest.mark.parametrize("n", [1, 4, 8])
def test_field_axioms_randomised(n):
    spec = FieldSpec(n)
    gf = get_field(spec)
    rng = np.random.default_rng(n)
    a, b, c = (gf.random(rng, 2000) for _ in range(3))

    assert np.array_equal(gf.mul(a, b), gf.mul(b, a))
    assert np.array_equal(gf.mul(gf.mul(a, b), c), gf.mul(a, gf.mul(b, c)))
    assert np.array_equal(gf.add(gf.add(a, b), c), gf.add(a, gf.add(b, c)))
    assert np.array_equal(gf.mul(a, gf.add(b, c)), gf.add(gf.mul(a, b), gf.mul(a, c)))

    nz = a[a != 0]
    assert np.all(gf.mul(nz, gf.inv(nz)) == 1)
    assert np.all(gf.div(gf.mul(nz, b[: nz.size]), nz) == b[: nz.size])


def test_vectorised_matches_scalar():
    gf = get_field(GF256)
    for a, b in itertools.product(range(0, 256, 7), range(0, 256, 11)):
        assert int(gf.mul(a, b)) == mul(el(a), el(b)).value


def test_power():
    gf = get_field(GF256)
    a = np.arange(1, 256)
    assert np.all(gf.power(a, 255) == 1)
    assert np.array_equal(gf.power(a, -1), gf.inv(a))
    assert gf.power(0, 3) == 0


def test_bits_symbols_msb_first():
    bits = np.array([1, 0, 0, 0, 0, 0, 1, 1, 0, 0, 0, 0, 0, 0, 0, 1])
    symbols = bits_to_symbols(bits, 8)
    assert symbols.tolist() == [0x83, 0x01]
    assert symbols_to_bits(symbols, 8).tolist() == bits.tolist()
    with pytest.raises(ParameterError):
        bits_to_symbols(np.ones(7), 8)


def _bruteforce_rank(entries, spec):
    """Dimension of the row span by enumerating every linear combination."""
    gf = get_field(spec)
    rows, cols = entries.shape
    span = set()
    for coeffs in itertools.product(range(spec.order), repeat=rows):
        acc = np.zeros(cols, dtype=np.int64)
        for c, row in zip(coeffs, entries):
            acc ^= gf.mul(c, row)
        span.add(tuple(acc.tolist()))
    return int(round(np.log(len(span)) / np.log(spec.order)))


class TestRank:

    def test_examples(self):
        assert rank(FieldMatrix.identity(3)) == 3
        assert rank(FieldMatrix.from_rows([[5, 7], [5, 7]])) == 1
        assert rank(FieldMatrix.zeros(3, 4)) == 0

    def test_binary_two_by_two_fraction(self):
        spec = FieldSpec(1)
        full = sum(
            rank(FieldMatrix(spec, np.array(bits).reshape(2, 2))) == 2
            for bits in itertools.product([0, 1], repeat=4)
        )
        assert full == 6
        assert full / 16 == pytest.approx(0.375)

    @pytest.mark.parametrize("n", [1, 2])
    def test_matches_bruteforce(self, n):
        spec = FieldSpec(n)
        rng = np.random.default_rng(10 + n)
        for _ in range(40):
            rows = int(rng.integers(1, 4 if n == 2 else 5))
            cols = int(rng.integers(1, 5))
            entries = rng.integers(0, spec.order, size=(rows, cols))
            assert rank(FieldMatrix(spec, entries)) == _bruteforce_rank(entries, spec)

    def test_rank_bound(self):
        rng = np.random.default_rng(3)
        m = FieldMatrix(GF256, rng.integers(0, 256, size=(3, 7)))
        assert rank(m) <= 3


class TestSolveOrReduce:

    def test_full_rank_recovers_planted_solution(self):
        gf = get_field(GF256)
        rng = np.random.default_rng(7)
        while True:
            a = rng.integers(0, 256, size=(5, 5))
            if rank(FieldMatrix(GF256, a)) == 5:
                break
        x = rng.integers(0, 256, size=(5, 12))
        rhs = np.zeros((5, 12), dtype=np.int64)
        for j in range(5):
            for i in range(5):
                rhs[j] ^= gf.mul(a[j, i], x[i])

        result = solve_or_reduce(FieldMatrix(GF256, a), rhs)
        assert result.full_rank
        assert result.rank == 5
        for i in range(5):
            assert np.array_equal(result.recovered[i], x[i])

    def test_partial_recovery_by_peeling_shape(self):
        alpha, beta = 0x1D, 0x42
        gf = get_field(GF256)
        x = np.array([[3, 4], [5, 6], [7, 8]])
        m = FieldMatrix.from_rows([[alpha, 0, 0], [alpha, beta, 0]])
        rhs = np.stack([gf.mul(alpha, x[0]), gf.mul(alpha, x[0]) ^ gf.mul(beta, x[1])])

        result = solve_or_reduce(m, rhs)
        assert set(result.recovered) == {0, 1}
        assert result.unresolved == {2}
        assert np.array_equal(result.recovered[0], x[0])
        assert np.array_equal(result.recovered[1], x[1])

    def test_all_zero_matrix(self):
        result = solve_or_reduce(FieldMatrix.zeros(3, 4), np.zeros((3, 2), dtype=np.int64))
        assert result.recovered == {}
        assert result.unresolved == {0, 1, 2, 3}
        assert result.rank == 0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            solve_or_reduce(FieldMatrix.identity(3), np.zeros((2, 4), dtype=np.int64))

    def test_rhs_outside_field(self):
        with pytest.raises(SpecMismatchError):
            solve_or_reduce(FieldMatrix.identity(2, FieldSpec(4)), np.array([[1], [16]]))

    def test_overdetermined_system(self):
        gf = get_field(GF256)
        m = FieldMatrix.from_rows([[1, 0], [0, 9], [3, 9]])
        x = np.array([[10], [20]])
        rhs = np.stack([x[0], gf.mul(9, x[1]), gf.mul(3, x[0]) ^ gf.mul(9, x[1])])
        result = solve_or_reduce(m, rhs)
        assert result.full_rank
        assert result.recovered[1].tolist() == [20]

    def test_peeling_is_subset_of_elimination(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            rows, cols = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            mask = rng.random((rows, cols)) < 0.35
            entries = np.where(mask, rng.integers(1, 256, size=(rows, cols)), 0)
            m = FieldMatrix(GF256, entries)
            assert set(peel_clean(m)) <= determined_columns(m)

    def test_peel_clean_values(self):
        gf = get_field(GF256)
        x = np.array([[11], [22]])
        m = FieldMatrix.from_rows([[5, 0], [6, 7]])
        rhs = np.stack([gf.mul(5, x[0]), gf.mul(6, x[0]) ^ gf.mul(7, x[1])])
        peeled = peel_clean(m, rhs)
        assert peeled[0].tolist() == [11]
        assert peeled[1].tolist() == [22]


def test_matrix_is_immutable():
    m = FieldMatrix.identity(2)
    with pytest.raises(ValueError):
        m.entries[0, 0] = 5
    with pytest.raises(ParameterError):
        FieldMatrix.from_rows([[256]])
