from ncdp.galois.field import (
    FieldElement,
    FieldSpec,
    GaloisField,
    add,
    bits_to_symbols,
    default_reduction_poly,
    get_field,
    inv,
    is_irreducible,
    mul,
    symbols_to_bits,
)
from ncdp.galois.matrix import (
    FieldMatrix,
    SolveResult,
    determined_columns,
    peel_clean,
    rank,
    rref,
    solve_or_reduce,
)

__all__ = [
    "FieldElement", "FieldSpec", "GaloisField", "add", "bits_to_symbols",
    "default_reduction_poly", "get_field", "inv", "is_irreducible", "mul",
    "symbols_to_bits", "FieldMatrix", "SolveResult", "determined_columns",
    "peel_clean", "rank", "rref", "solve_or_reduce",
]
