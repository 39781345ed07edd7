"""Dense complex linear algebra kernels.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Everything
that enters the package goes through :func:`as_matrix`, which copies the
data, checks it and marks the copy read-only, so downstream code can share
arrays freely without defensive copies.

Residual conventions
--------------------
All residuals are relative Frobenius norms with a ``max(1, .)`` floor in
the denominator, e.g. ``||A Z A - A|| / max(1, ||A||)``.  A residual is
"numerically zero" when it does not exceed ``tol`` (default
:data:`DEFAULT_TOL`).
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lapack

from .errors import ConvergenceError, DimensionError

DEFAULT_TOL = 1e-10
EPS = np.finfo(np.float64).eps

__all__ = [
    "DEFAULT_TOL",
    "PenroseReport",
    "PinvResult",
    "Projectors",
    "as_matrix",
    "default_rank_tol",
    "fro",
    "hermitian_residual",
    "penrose_check",
    "pinv",
    "projectors",
    "range_inclusion",
    "relative_error",
    "svd",
]


def as_matrix(x, name="matrix", allow_empty_cols=False):
    """Validate ``x`` and return it as a read-only complex128 2-D array.

    Parameters
    ----------
    x : array_like
        Matrix entries.  Real input is promoted to complex.
    name : str
        Used in error messages.
    allow_empty_cols : bool
        Accept an ``m x 0`` matrix.  This is how a rank-0 update factor
        (``r = 0``) is represented; any other empty shape is rejected.

    Raises
    ------
    DimensionError
        If ``x`` is not two-dimensional or has a zero dimension.
    ValueError
        If any entry is NaN or infinite.
    """
    arr = np.array(x, dtype=np.complex128, copy=True)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {arr.shape}")
    rows, cols = arr.shape
    if rows == 0 or (cols == 0 and not allow_empty_cols):
        raise DimensionError(f"{name} has an empty dimension: {arr.shape}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} has non-finite entries")
    arr.flags.writeable = False
    return arr


def fro(x):
    """Frobenius norm; 0 for empty arrays."""
    return float(np.linalg.norm(x)) if x.size else 0.0


def relative_error(x, ref):
    """``||x - ref||_F / ||ref||_F``, falling back to ``||x||_F`` if ref is 0."""
    if x.shape != ref.shape:
        raise DimensionError(f"shape mismatch: {x.shape} vs {ref.shape}")
    denom = fro(ref)
    diff = fro(x - ref)
    return diff / denom if denom > 0 else diff


def _scaled(num, ref):
    return num / max(1.0, ref)


def default_rank_tol(shape):
    """Relative singular value cutoff ``max(m, n) * eps``."""
    return max(shape) * EPS


def svd(a):
    """Thin SVD through LAPACK ``zgesdd``.

    Returns ``(u, s, vh)`` with ``s`` descending.  Raises
    :class:`ConvergenceError` carrying LAPACK's ``info`` on failure.
    """
    u, s, vh, info = lapack.zgesdd(a, compute_uv=1, full_matrices=0)
    if info > 0:
        raise ConvergenceError(
            f"zgesdd did not converge ({info} unconverged superdiagonals)", info
        )
    if info < 0:
        raise ValueError(f"illegal argument {-info} passed to zgesdd")
    return u, s, vh


@dataclass(frozen=True)
class PenroseReport:
    """Residuals of the four Penrose equations and a verdict for each."""

    residuals: tuple
    tol: float

    @property
    def passed(self):
        return tuple(res <= self.tol for res in self.residuals)

    @property
    def all_pass(self):
        return all(self.passed)

    def __str__(self):
        parts = [
            f"({i}) {res:.3e} {'ok' if ok else 'FAIL'}"
            for i, (res, ok) in enumerate(zip(self.residuals, self.passed), 1)
        ]
        return "Penrose " + ", ".join(parts)


@dataclass(frozen=True)
class PinvResult:
    """An MP-inverse candidate with its diagnostics.

    ``numerical_rank`` and ``singular_values`` are only known when the
    candidate came from an SVD; formula-based results leave them ``None``.
    ``penrose`` is ``None`` when checking was skipped.  ``conditions`` is
    set by the update routines and carries the hypothesis report the
    result was computed under.
    """

    pinv: np.ndarray
    tol: float
    penrose: PenroseReport = None
    numerical_rank: int = None
    singular_values: np.ndarray = None
    conditions: object = None

    @property
    def penrose_residuals(self):
        return None if self.penrose is None else self.penrose.residuals


@dataclass(frozen=True)
class Projectors:
    """``e_proj = I - A A^+`` (onto N(A^*)) and ``f_proj = I - A^+ A`` (onto N(A))."""

    e_proj: np.ndarray
    f_proj: np.ndarray


def pinv(a, tol=None, check=True, check_tol=DEFAULT_TOL):
    """Moore-Penrose inverse by truncated SVD.

    Parameters
    ----------
    a : array_like, shape (m, n)
    tol : float, optional
        Relative cutoff: singular values ``<= tol * sigma_max`` are
        treated as zero.  Defaults to ``max(m, n) * eps``.
    check : bool
        Compute the Penrose residuals of the result.  This costs a few
        dense products, so timing-sensitive callers switch it off.
    check_tol : float
        Tolerance used for the Penrose verdicts.

    Returns
    -------
    PinvResult
    """
    a = as_matrix(a, "a")
    if tol is None:
        tol = default_rank_tol(a.shape)
    u, s, vh = svd(a)
    rank = int(np.count_nonzero(s > tol * s[0])) if s.size and s[0] > 0 else 0
    z = (vh[:rank].conj().T / s[:rank]) @ u[:, :rank].conj().T
    z.flags.writeable = False
    s.flags.writeable = False
    report = penrose_check(a, z, check_tol) if check else None
    return PinvResult(z, tol, report, rank, s)


def _pinv_small(a, tol, scale=1.0):
    """Pinv of a (possibly 0 x 0) small matrix.

    Singular values up to ``tol * max(scale, sigma_max)`` are dropped;
    ``scale`` should reflect the rounding noise in how ``a`` was formed.
    """
    if a.size == 0:
        return np.zeros(a.shape[::-1], dtype=np.complex128), 0
    u, s, vh = svd(np.ascontiguousarray(a))
    rank = int(np.count_nonzero(s > tol * max(scale, s[0])))
    return (vh[:rank].conj().T / s[:rank]) @ u[:, :rank].conj().T, rank


def _check_transposed(a, z, what="pinv"):
    if z.shape != a.shape[::-1]:
        raise DimensionError(
            f"{what} has shape {z.shape}, expected {a.shape[::-1]}"
        )


def projectors(a, a_pinv):
    """Orthogonal projectors ``E_A = I - A A^+`` and ``F_A = I - A^+ A``."""
    a = np.asarray(a)
    a_pinv = np.asarray(a_pinv)
    _check_transposed(a, a_pinv)
    m, n = a.shape
    e_proj = np.eye(m, dtype=np.complex128) - a @ a_pinv
    f_proj = np.eye(n, dtype=np.complex128) - a_pinv @ a
    e_proj.flags.writeable = False
    f_proj.flags.writeable = False
    return Projectors(e_proj, f_proj)


def range_inclusion(b, a, a_pinv, tol=DEFAULT_TOL):
    """Decide whether ``R(b)`` is contained in ``R(a)``.

    The residual is ``||(I - a a^+) b||_F / max(1, ||b||_F)``, evaluated as
    ``b - a (a^+ b)`` so no ``m x m`` matrix is formed.

    Returns
    -------
    included : bool
    residual : float
    """
    b = np.asarray(b)
    a = np.asarray(a)
    a_pinv = np.asarray(a_pinv)
    _check_transposed(a, a_pinv)
    if b.shape[0] != a.shape[0]:
        raise DimensionError(
            f"b has {b.shape[0]} rows but a has {a.shape[0]}"
        )
    if b.size == 0:
        return True, 0.0
    residual = _scaled(fro(b - a @ (a_pinv @ b)), fro(b))
    return residual <= tol, residual


def penrose_check(a, z, tol=DEFAULT_TOL):
    """Relative residuals of ``AZA=A``, ``ZAZ=Z``, ``(AZ)^*=AZ``, ``(ZA)^*=ZA``."""
    a = np.asarray(a)
    z = np.asarray(z)
    _check_transposed(a, z, "z")
    az = a @ z
    za = z @ a
    residuals = (
        _scaled(fro(az @ a - a), fro(a)),
        _scaled(fro(za @ z - z), fro(z)),
        _scaled(fro(az.conj().T - az), fro(az)),
        _scaled(fro(za.conj().T - za), fro(za)),
    )
    return PenroseReport(residuals, tol)


def hermitian_residual(x):
    """``||x - x^*||_F / max(1, ||x||_F)`` for a square ``x``."""
    x = np.asarray(x)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {x.shape}")
    return _scaled(fro(x - x.conj().T), fro(x))
