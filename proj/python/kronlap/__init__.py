"""Laplacian-like Kronecker decompositions and a greedy rank-one solver."""

from ._kronlap import (
    IoError,
    KronlapError,
    LaplacianLike,
    PreconditionError,
    SingularMatrixError,
    SizeLimitError,
    ValidationError,
    build_poisson,
    decompose,
    dense_exp,
    direct_solve,
    embed,
    grou,
    kron,
    lap_exp,
    laplacian_distance,
    lie_bracket,
    partial_trace,
    read_matrix_market,
    write_matrix_market,
)

__all__ = [
    "IoError",
    "KronlapError",
    "LaplacianLike",
    "PreconditionError",
    "SingularMatrixError",
    "SizeLimitError",
    "ValidationError",
    "build_poisson",
    "decompose",
    "dense_exp",
    "direct_solve",
    "embed",
    "grou",
    "kron",
    "lap_exp",
    "laplacian_distance",
    "lie_bracket",
    "partial_trace",
    "read_matrix_market",
    "write_matrix_market",
]
