"""Seeded test instances and the reference pseudoinverse.

Every generator draws from a counter-based Philox stream keyed by the
seed, so an identical :class:`GenSpec` always yields bit-identical
matrices, independent of the platform's default generator.

Regimes
-------
``thm32``
    ``U = A G1``, ``V = A^* G2`` rescaled so ``||V^* A^+ U||_2 = scale < 1``.
    All four range inclusions hold and ``S_A`` is nonsingular.
``thm37-negative``
    Ranges hold but ``S_A`` is singular and the formula is not the MP
    inverse.  Without a seed this is the curated 2 x 2 witness.
``adversarial``
    Ranges hold, with either a large update (``scale`` well above 1) or a
    planted singular ``S_A``.  No verdict is promised.
``nonsingular-classic``
    Square nonsingular ``A`` with Gaussian ``U``, ``V`` and
    ``||V^* A^{-1} U||_2 = scale < 1``.
``xny``
    ``(X, N, Y)`` with ``X E_N = E_N`` and ``F_N Y = F_N`` by construction.
``block``
    Blocks ``(A, B, C, D)`` with ``B = G1 A`` and ``C = A G2``.
"""

from dataclasses import asdict, dataclass

import numpy as np
import scipy.linalg

from .errors import SearchExhaustedError
from .linalg import as_matrix, default_rank_tol, relative_error
from .smw import UpdateInstance, check_conditions, smw_pinv

__all__ = [
    "REGIMES",
    "GenSpec",
    "curated_negative",
    "gen_adversarial",
    "gen_block",
    "gen_conditioned",
    "gen_negative",
    "gen_nonsingular_classic",
    "gen_xny",
    "generate",
    "make_rng",
    "oracle_pinv",
]

REGIMES = ("thm32", "thm37-negative", "nonsingular-classic", "xny", "block",
           "adversarial")

# singular values of generated A are log-uniform in this range
SV_RANGE = (0.1, 10.0)
NEGATIVE_BUDGET = 100_000


@dataclass(frozen=True)
class GenSpec:
    """Parameters of one generated instance.

    ``s`` is the column count of the ``C``/``D`` blocks in the block
    regime (defaults to ``r``); other regimes ignore it.  For
    ``thm37-negative`` a ``seed`` of ``None`` selects the curated
    instance.
    """

    m: int = 2
    n: int = 2
    r: int = 1
    rank: int = None
    regime: str = "thm32"
    seed: int = None
    scale: float = 0.5
    s: int = None

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ValueError(f"unknown regime {self.regime!r}")
        if self.m < 1 or self.n < 1:
            raise ValueError("m and n must be positive")
        if self.r < 0:
            raise ValueError("r must be nonnegative")
        if self.rank is not None and not 0 <= self.rank <= min(self.m, self.n):
            raise ValueError(f"rank {self.rank} outside [0, {min(self.m, self.n)}]")
        if self.scale < 0:
            raise ValueError("scale must be nonnegative")
        if self.regime in ("thm32", "nonsingular-classic") and not 0 < self.scale < 1:
            raise ValueError(f"{self.regime} needs 0 < scale < 1")
        if self.regime == "nonsingular-classic" and self.m != self.n:
            raise ValueError("nonsingular-classic needs m == n")
        if self.regime == "block" and (self.r < 1 or self.block_s < 1):
            raise ValueError("block regime needs r >= 1 and s >= 1")

    @property
    def effective_rank(self):
        return min(self.m, self.n) if self.rank is None else self.rank

    @property
    def block_s(self):
        return self.r if self.s is None else self.s

    @property
    def effective_seed(self):
        return 0 if self.seed is None else self.seed

    def as_dict(self):
        return asdict(self)


def make_rng(seed):
    """Philox-backed generator for ``seed``."""
    return np.random.Generator(np.random.Philox(seed))


def _cnormal(rng, *shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def _unitary(rng, n):
    q, r = np.linalg.qr(_cnormal(rng, n, n))
    d = np.diag(r)
    return q * (d / np.abs(d))


def _ranked(rng, m, n, rank, sv_range=SV_RANGE):
    """``P diag(sigma) Q^*`` with exactly ``rank`` nonzero singular values."""
    p = _unitary(rng, m)[:, :rank]
    q = _unitary(rng, n)[:, :rank]
    lo, hi = np.log(sv_range[0]), np.log(sv_range[1])
    sigma = np.sort(np.exp(rng.uniform(lo, hi, rank)))[::-1]
    return (p * sigma) @ q.conj().T


def _instance(a, u, v, spec, provenance="generated"):
    return UpdateInstance.create(a, u, v, provenance=provenance,
                                 seed=spec.seed)


def gen_conditioned(spec):
    """Instance satisfying all four range inclusions (see module notes)."""
    rng = make_rng(spec.effective_seed)
    m, n, r = spec.m, spec.n, spec.r
    a = _ranked(rng, m, n, spec.effective_rank)
    g1 = _cnormal(rng, n, r)
    g2 = _cnormal(rng, m, r)
    u, v = a @ g1, a.conj().T @ g2
    if r:
        # V^* A^+ U = G2^* A A^+ A G1 = G2^* A G1
        size = np.linalg.norm(g2.conj().T @ a @ g1, 2)
        if size > 0:
            alpha = np.sqrt(spec.scale / size)
            u, v = alpha * u, alpha * v
    return _instance(a, u, v, spec)


def gen_nonsingular_classic(spec):
    """Square nonsingular ``A`` with a small Gaussian update."""
    rng = make_rng(spec.effective_seed)
    n, r = spec.n, spec.r
    a = _ranked(rng, n, n, n)
    u = _cnormal(rng, n, r)
    v = _cnormal(rng, n, r)
    if r:
        size = np.linalg.norm(v.conj().T @ np.linalg.solve(a, u), 2)
        alpha = np.sqrt(spec.scale / size)
        u, v = alpha * u, alpha * v
    return _instance(a, u, v, spec)


def curated_negative():
    """``A = diag(1, 0)``, ``U = e1``, ``V = -e1``: ``A + U V^* = 0``, ``S_A = 0``."""
    return UpdateInstance.create(np.diag([1.0, 0.0]), [[1.0], [0.0]],
                                 [[-1.0], [0.0]], provenance="curated")


_INTS = np.array([-1, 0, 1])
_HALVES = np.array([-1.0, -0.5, 0.0, 0.5, 1.0])
_SPARSITY = np.array([0.0, 0.5, 0.75, 0.9])


def _discrete(rng, values, shape, complex_prob=0.5, sparsity=0.0):
    re = rng.choice(values, size=shape)
    if rng.random() < complex_prob:
        re = re + 1j * rng.choice(values, size=shape)
    return np.where(rng.random(shape) < sparsity, 0, re).astype(np.complex128)


def _exactly_singular(s):
    """Singularity test for ``I + T`` with T built from quarter-integers."""
    # 4 * S has Gaussian-integer entries, so its determinant is a Gaussian
    # integer and rounding the float determinant is exact at these sizes.
    return abs(np.linalg.det(4 * s)) < 0.5


def gen_negative(spec, budget=NEGATIVE_BUDGET, tol=1e-10):
    """Instance where the ranges hold but the update formula is wrong.

    Draws ``A = B C`` with entries in {-1, 0, 1} (optionally Gaussian
    integers) and half-integer ``G1``, ``G2``, sets ``U = A G1``,
    ``V = A^* G2`` and keeps the first draw where ``S_A`` is exactly
    singular, the checker rejects the formula and the oracle disagrees
    with it by more than ``1e-6``.

    Raises
    ------
    SearchExhaustedError
        When ``budget`` draws produce no such instance.  With ``r = 0``
        this is immediate: there is no update to get wrong.
    """
    if spec.seed is None and spec.r > 0:
        return curated_negative()
    if spec.r == 0 or spec.effective_rank == 0:
        raise SearchExhaustedError(
            "no violating instance exists without an update", 0)
    rng = make_rng(spec.effective_seed)
    m, n, r, k = spec.m, spec.n, spec.r, spec.effective_rank
    for attempt in range(1, budget + 1):
        a = _discrete(rng, _INTS, (m, k)) @ _discrete(rng, _INTS, (k, n))
        # sparse draws make a singular S_A far more likely for larger r
        sparsity = rng.choice(_SPARSITY)
        g1 = _discrete(rng, _HALVES, (n, r), sparsity=sparsity)
        g2 = _discrete(rng, _HALVES, (m, r), sparsity=sparsity)
        t = g2.conj().T @ a @ g1
        if not _exactly_singular(np.eye(r) + t):
            continue
        if np.linalg.matrix_rank(a) != k:
            continue
        inst = _instance(a, a @ g1, a.conj().T @ g2, spec)
        report = check_conditions(inst, tol=tol)
        if not report.ranges_hold or report.verdict_thm37:
            continue
        z = smw_pinv(inst, tol=tol, check=False).pinv
        if relative_error(z, oracle_pinv(inst.updated())) > 1e-6:
            return inst
    raise SearchExhaustedError(
        f"no violating instance in {budget} draws for {spec}", budget)


def gen_adversarial(spec):
    """Ranges hold, but the update is large or ``S_A`` is planted singular.

    Odd seeds (and any instance with ``rank < r``) get a large update,
    rescaled so ``||V^* A^+ U||_2 = 1 + scale``.  Even seeds plant
    ``S_A = S0``: a random rank ``r - 1`` matrix, or for ``r >= 2`` and
    seeds divisible by 4, a nilpotent Jordan block.
    """
    rng = make_rng(spec.effective_seed)
    m, n, r, k = spec.m, spec.n, spec.r, spec.effective_rank
    a = _ranked(rng, m, n, k)
    g1 = _cnormal(rng, n, r)
    g2 = _cnormal(rng, m, r)
    if r == 0 or k == 0:
        return _instance(a, a @ g1, a.conj().T @ g2, spec)
    if spec.effective_seed % 2 or k < r:
        size = np.linalg.norm(g2.conj().T @ a @ g1, 2)
        alpha = np.sqrt((1.0 + spec.scale) / size)
        return _instance(a, alpha * (a @ g1), alpha * (a.conj().T @ g2), spec)
    if r >= 2 and spec.effective_seed % 4 == 0:
        target = np.eye(r, k=1, dtype=np.complex128)
    else:
        target = _cnormal(rng, r, r - 1) @ _cnormal(rng, r - 1, r)
    # solve G2^* A G1 = target - I for G1 in the row space of G2^* A
    g2a = g2.conj().T @ a
    g1 = np.linalg.lstsq(g2a, target - np.eye(r), rcond=None)[0]
    return _instance(a, a @ g1, a.conj().T @ g2, spec)


def gen_xny(spec):
    """``(X, N, Y)`` with ``X = I + W N N^+`` and ``Y = I + N^+ N W'``.

    ``W`` and ``W'`` are Gaussian with spectral norm ``scale`` (at most
    0.5), so ``X`` and ``Y`` stay nonsingular.
    """
    if spec.scale > 0.5:
        raise ValueError("xny needs scale <= 0.5")
    rng = make_rng(spec.effective_seed)
    m, n, k = spec.m, spec.n, spec.effective_rank
    p = _unitary(rng, m)[:, :k]
    q = _unitary(rng, n)[:, :k]
    sigma = np.exp(rng.uniform(*np.log(SV_RANGE), k))
    big_n = (p * sigma) @ q.conj().T
    w_left = _cnormal(rng, m, m)
    w_right = _cnormal(rng, n, n)
    w_left *= spec.scale / np.linalg.norm(w_left, 2)
    w_right *= spec.scale / np.linalg.norm(w_right, 2)
    # N N^+ = P P^*, N^+ N = Q Q^*
    x = np.eye(m) + w_left @ (p @ p.conj().T)
    y = np.eye(n) + (q @ q.conj().T) @ w_right
    return as_matrix(x, "X"), as_matrix(big_n, "N"), as_matrix(y, "Y")


def gen_block(spec):
    """Blocks ``(A, B, C, D)`` with ``B = G1 A`` and ``C = A G2``.

    ``A`` is ``m x n`` of rank ``spec.rank``, ``B`` is ``r x n``, ``C`` is
    ``m x s`` and ``D`` is a Gaussian ``r x s`` block.
    """
    from .block import BlockMatrix

    rng = make_rng(spec.effective_seed)
    m, n, r, s = spec.m, spec.n, spec.r, spec.block_s
    a = _ranked(rng, m, n, spec.effective_rank)
    b = _cnormal(rng, r, m) @ a
    c = a @ _cnormal(rng, n, s)
    d = _cnormal(rng, r, s)
    return BlockMatrix.create(a, b, c, d)


_DISPATCH = {
    "thm32": gen_conditioned,
    "thm37-negative": gen_negative,
    "adversarial": gen_adversarial,
    "nonsingular-classic": gen_nonsingular_classic,
    "xny": gen_xny,
    "block": gen_block,
}


def generate(spec):
    """Dispatch on ``spec.regime``."""
    return _DISPATCH[spec.regime](spec)


def oracle_pinv(a):
    """Reference MP inverse through LAPACK ``gesvd``.

    Deliberately shares no code with :func:`smwpinv.linalg.pinv`, which
    uses the divide-and-conquer driver ``gesdd``.  The rank cutoff is the
    same ``max(m, n) * eps * sigma_max`` rule.
    """
    a = np.asarray(a, dtype=np.complex128)
    u, s, vh = scipy.linalg.svd(a, full_matrices=False, lapack_driver="gesvd")
    if s.size == 0 or s[0] == 0:
        return np.zeros(a.shape[::-1], dtype=np.complex128)
    keep = s > default_rank_tol(a.shape) * s[0]
    return (vh[keep].conj().T * (1.0 / s[keep])) @ u[:, keep].conj().T
