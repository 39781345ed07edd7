"""Moore-Penrose inverses of low-rank updated matrices.

The centerpiece is :func:`smw_pinv`, which turns a cached ``A^+`` into
``(A + U V^*)^+`` using only r x r solves and panel products, together
with :func:`check_conditions`, which decides whether that result really
is the Moore-Penrose inverse.
"""

__version__ = "0.1.0"

from .block import BlockMatrix, block_pinv, schur_complement, update_as_xny, xny_pinv
from .errors import (
    ConvergenceError,
    DimensionError,
    ParseError,
    PreconditionError,
    SearchExhaustedError,
    SingularSystemError,
    SmwError,
)
from .generate import GenSpec, generate, oracle_pinv
from .linalg import (
    DEFAULT_TOL,
    PinvResult,
    as_matrix,
    hermitian_residual,
    penrose_check,
    pinv,
    projectors,
    range_inclusion,
    relative_error,
)
from .smw import (
    ConditionReport,
    SchurFactors,
    UpdateInstance,
    check_conditions,
    schur_factors,
    smw_classic,
    smw_pinv,
    smw_pinv_simplified,
)

__all__ = [
    "DEFAULT_TOL",
    "BlockMatrix",
    "ConditionReport",
    "ConvergenceError",
    "DimensionError",
    "GenSpec",
    "ParseError",
    "PinvResult",
    "PreconditionError",
    "SchurFactors",
    "SearchExhaustedError",
    "SingularSystemError",
    "SmwError",
    "UpdateInstance",
    "as_matrix",
    "block_pinv",
    "check_conditions",
    "generate",
    "hermitian_residual",
    "oracle_pinv",
    "penrose_check",
    "pinv",
    "projectors",
    "range_inclusion",
    "relative_error",
    "schur_complement",
    "schur_factors",
    "smw_classic",
    "smw_pinv",
    "smw_pinv_simplified",
    "update_as_xny",
    "xny_pinv",
]
