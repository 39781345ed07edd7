"""MP inverses of structured matrices.

Two closed forms live here.  Both serve as computational paths that are
independent of :mod:`smwpinv.smw`, so the update formula can be
cross-checked against them.

* :func:`block_pinv` handles a 2 x 2 block matrix ``[[A, C], [B, D]]``
  with ``R(B^*) in R(A^*)`` and ``R(C) in R(A)``, using the generalized
  Schur complement ``S = D - B A^+ C``.
* :func:`xny_pinv` handles a product ``X N Y`` with ``X``, ``Y``
  nonsingular, ``X E_N = E_N`` and ``F_N Y = F_N``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from .errors import DimensionError, PreconditionError, SingularSystemError
from .linalg import (
    DEFAULT_TOL,
    PinvResult,
    _pinv_small,
    as_matrix,
    fro,
    penrose_check,
    pinv,
    range_inclusion,
)
from .smw import SINGULAR_COND

__all__ = [
    "BlockMatrix",
    "BlockSchurFactors",
    "block_pinv",
    "schur_complement",
    "update_as_xny",
    "xny_pinv",
]


def _ct(x):
    return x.conj().T


def _hpd_inverse(mat, what):
    """Inverse of a Hermitian positive definite matrix by Cholesky."""
    mat = 0.5 * (mat + _ct(mat))
    try:
        factor = cho_factor(mat)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"{what} is not positive definite") from exc
    return cho_solve(factor, np.eye(mat.shape[0], dtype=np.complex128))


def _inverse(mat, what):
    cond = np.linalg.cond(mat)
    if not cond <= SINGULAR_COND:
        raise SingularSystemError(
            f"{what} is numerically singular (condition {cond:.3e})", cond)
    return np.linalg.inv(mat)


@dataclass(frozen=True)
class BlockMatrix:
    """Blocks of ``M = [[A, C], [B, D]]``.

    Shapes: ``A`` p x q, ``B`` r x q, ``C`` p x s, ``D`` r x s.
    """

    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    @classmethod
    def create(cls, a, b, c, d):
        a, b = as_matrix(a, "A"), as_matrix(b, "B")
        c, d = as_matrix(c, "C"), as_matrix(d, "D")
        p, q = a.shape
        r, s = d.shape
        if b.shape != (r, q) or c.shape != (p, s):
            raise DimensionError(
                f"incoherent blocks: A {a.shape}, B {b.shape}, C {c.shape}, D {d.shape}"
            )
        return cls(a, b, c, d)

    def assemble(self):
        return np.block([[self.a, self.c], [self.b, self.d]])


@dataclass(frozen=True)
class BlockSchurFactors:
    """Shared quantities of the block formula.

    ``h = B A^+``, ``k = A^+ C``, ``phi = (I + h^* E_S h)^{-1}``,
    ``psi = (I + k F_S k^*)^{-1}`` and
    ``sigma = psi (A^+ + k S^+ h) phi``.
    """

    a_pinv: np.ndarray
    s_a: np.ndarray
    s_a_pinv: np.ndarray
    e_s: np.ndarray
    f_s: np.ndarray
    h: np.ndarray
    k: np.ndarray
    phi: np.ndarray
    psi: np.ndarray
    sigma: np.ndarray


def schur_complement(m, a_pinv=None, tol=DEFAULT_TOL):
    """Generalized Schur complement ``D - B A^+ C`` and its companions.

    ``S^+`` drops singular values up to
    ``tol * max(1, sigma_max, ||B A^+||_F ||C||_F)``.
    """
    if a_pinv is None:
        a_pinv = pinv(m.a, check=False).pinv
    elif a_pinv.shape != m.a.shape[::-1]:
        raise DimensionError(f"a_pinv has shape {a_pinv.shape}")
    h = m.b @ a_pinv
    k = a_pinv @ m.c
    s_a = m.d - h @ m.c
    s_pinv, _ = _pinv_small(s_a, tol, max(1.0, fro(h) * fro(m.c)))
    e_s = np.eye(s_a.shape[0], dtype=np.complex128) - s_a @ s_pinv
    f_s = np.eye(s_a.shape[1], dtype=np.complex128) - s_pinv @ s_a
    p, q = m.a.shape
    phi = _hpd_inverse(np.eye(p) + _ct(h) @ e_s @ h, "I + H^* E_S H")
    psi = _hpd_inverse(np.eye(q) + k @ f_s @ _ct(k), "I + K F_S K^*")
    sigma = psi @ (a_pinv + k @ s_pinv @ h) @ phi
    return BlockSchurFactors(a_pinv, s_a, s_pinv, e_s, f_s, h, k, phi, psi, sigma)


def block_pinv(m, tol=DEFAULT_TOL, a_pinv=None, check=True):
    """MP inverse of ``[[A, C], [B, D]]`` through the Schur complement.

    Parameters
    ----------
    m : BlockMatrix
    tol : float
        Threshold for the range-inclusion preconditions, the rank of
        ``S`` and the Penrose verdicts.
    a_pinv : ndarray, optional
        Precomputed ``A^+``.

    Returns
    -------
    PinvResult
        The inverse is ``(q + s) x (p + r)``.

    Raises
    ------
    PreconditionError
        If ``R(B^*)`` is not in ``R(A^*)`` or ``R(C)`` is not in ``R(A)``.
    """
    if a_pinv is None:
        a_pinv = pinv(m.a, check=False).pinv
    ok_b, res_b = range_inclusion(_ct(m.b), _ct(m.a), _ct(a_pinv), tol)
    ok_c, res_c = range_inclusion(m.c, m.a, a_pinv, tol)
    if not (ok_b and ok_c):
        raise PreconditionError(
            "block formula needs R(B^*) in R(A^*) and R(C) in R(A)",
            {"r_bstar_in_astar": res_b, "r_c_in_a": res_c},
        )
    f = schur_complement(m, a_pinv, tol)
    sig, s_p = f.sigma, f.s_a_pinv
    h_e = _ct(f.h) @ f.e_s          # p x r
    f_k = f.f_s @ _ct(f.k)          # s x q
    psi_k_s = f.psi @ f.k @ s_p     # q x r
    s_h_phi = s_p @ f.h @ f.phi     # s x p
    top_left = sig
    top_right = sig @ h_e - psi_k_s
    bottom_left = f_k @ sig - s_h_phi
    bottom_right = s_p - s_h_phi @ h_e - f_k @ psi_k_s + f_k @ sig @ h_e
    z = np.block([[top_left, top_right], [bottom_left, bottom_right]])
    z.flags.writeable = False
    penrose = penrose_check(m.assemble(), z, tol) if check else None
    return PinvResult(z, tol, penrose)


def xny_pinv(x, n, y, tol=DEFAULT_TOL, check=True):
    """MP inverse of ``X N Y`` for nonsingular ``X``, ``Y``.

    With ``R = E_N (I - X^{-1})`` and ``L = (I - Y^{-1}) F_N``::

        (XNY)^+ = (I + L^*)(I + L L^*)^{-1} Y^{-1} N^+ X^{-1} (I + R^* R)^{-1} (I + R^*)

    Raises
    ------
    PreconditionError
        If ``X E_N != E_N`` or ``F_N Y != F_N`` beyond ``tol`` (relative
        to ``max(1, ||E_N||)`` and ``max(1, ||F_N||)``).
    SingularSystemError
        If ``X`` or ``Y`` is numerically singular.
    """
    x, n, y = as_matrix(x, "X"), as_matrix(n, "N"), as_matrix(y, "Y")
    rows, cols = n.shape
    if x.shape != (rows, rows) or y.shape != (cols, cols):
        raise DimensionError(
            f"X {x.shape} and Y {y.shape} do not fit N {n.shape}"
        )
    n_pinv = pinv(n, check=False).pinv
    e_n = np.eye(rows) - n @ n_pinv
    f_n = np.eye(cols) - n_pinv @ n
    res_x = fro(x @ e_n - e_n) / max(1.0, fro(e_n))
    res_y = fro(f_n @ y - f_n) / max(1.0, fro(f_n))
    if res_x > tol or res_y > tol:
        raise PreconditionError(
            "factored formula needs X E_N = E_N and F_N Y = F_N",
            {"x_e_n": res_x, "f_n_y": res_y},
        )
    x_inv = _inverse(x, "X")
    y_inv = _inverse(y, "Y")
    r_mat = e_n @ (np.eye(rows) - x_inv)
    l_mat = (np.eye(cols) - y_inv) @ f_n
    left = (np.eye(cols) + _ct(l_mat)) @ _hpd_inverse(
        np.eye(cols) + l_mat @ _ct(l_mat), "I + L L^*")
    right = _hpd_inverse(np.eye(rows) + _ct(r_mat) @ r_mat, "I + R^* R") @ (
        np.eye(rows) + _ct(r_mat))
    z = left @ (y_inv @ n_pinv @ x_inv) @ right
    z.flags.writeable = False
    penrose = penrose_check(x @ n @ y, z, tol) if check else None
    return PinvResult(z, tol, penrose)


def update_as_xny(a, u, v):
    """Embed ``A + U V^*`` as ``X N Y = [[A + U V^*, 0], [0, I]]``.

    Returns ``(X, N, Y)`` with ``X = [[I, -U], [0, I]]``,
    ``N = [[A, U], [-V^*, I]]`` and ``Y = [[I, 0], [V^*, I]]``.
    """
    m, n = a.shape
    r = u.shape[1]
    eye_r = np.eye(r)
    x = np.block([[np.eye(m), -u], [np.zeros((r, m)), eye_r]])
    big_n = np.block([[a, u], [-_ct(v), eye_r]])
    y = np.block([[np.eye(n), np.zeros((n, r))], [_ct(v), eye_r]])
    return x, big_n, y
