import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from conftest import cnormal, low_rank
from smwpinv import linalg
from smwpinv.errors import ConvergenceError, DimensionError
from smwpinv.generate import oracle_pinv
from smwpinv.linalg import (
    as_matrix,
    hermitian_residual,
    penrose_check,
    pinv,
    projectors,
    range_inclusion,
    relative_error,
)


def test_as_matrix_validates():
    m = as_matrix([[1, 2], [3, 4]])
    assert m.dtype == np.complex128
    assert not m.flags.writeable
    with pytest.raises(DimensionError):
        as_matrix(np.zeros((0, 3)))
    with pytest.raises(DimensionError):
        as_matrix(np.zeros((3, 0)))
    with pytest.raises(DimensionError):
        as_matrix([1, 2, 3])
    with pytest.raises(ValueError, match="non-finite"):
        as_matrix([[1, np.nan]])
    assert as_matrix(np.zeros((3, 0)), allow_empty_cols=True).shape == (3, 0)


def test_as_matrix_copies():
    src = np.eye(2, dtype=complex)
    m = as_matrix(src)
    src[0, 0] = 5
    assert m[0, 0] == 1


class TestPinv:
    def test_diagonal(self):
        res = pinv(np.diag([2.0, 0.0]))
        assert_array_equal(res.pinv, np.diag([0.5, 0.0]))
        assert res.numerical_rank == 1

    def test_zero(self):
        res = pinv(np.zeros((2, 3)))
        assert res.pinv.shape == (3, 2)
        assert not res.pinv.any()
        assert res.numerical_rank == 0

    def test_nonsingular(self):
        res = pinv([[1.0, 1.0], [0.0, 1.0]])
        assert_allclose(res.pinv, [[1, -1], [0, 1]], atol=1e-15)
        assert res.numerical_rank == 2

    def test_rank_deficient_matches_oracle(self, rng):
        a = low_rank(rng, 7, 5, 3)
        res = pinv(a)
        assert res.numerical_rank == 3
        assert relative_error(res.pinv, oracle_pinv(a)) <= 1e-12
        assert res.penrose.all_pass

    def test_result_fields(self, rng):
        res = pinv(cnormal(rng, 4, 6))
        s = res.singular_values
        assert np.all(np.diff(s) <= 0) and np.all(s >= 0)
        assert res.numerical_rank <= 4
        assert all(r >= 0 for r in res.penrose_residuals)
        assert res.tol == 6 * np.finfo(float).eps

    def test_custom_cutoff(self):
        res = pinv(np.diag([1.0, 1e-3]), tol=1e-2)
        assert res.numerical_rank == 1

    def test_unchecked(self, rng):
        assert pinv(cnormal(rng, 3, 3), check=False).penrose is None

    def test_convergence_failure(self, monkeypatch):
        def broken(a, **kw):
            return None, None, None, 3

        monkeypatch.setattr(linalg.lapack, "zgesdd", broken)
        with pytest.raises(ConvergenceError) as info:
            pinv(np.eye(3))
        assert info.value.unconverged == 3


class TestProjectors:
    def test_identity(self):
        p = projectors(np.eye(3), np.eye(3))
        assert not p.e_proj.any() and not p.f_proj.any()

    def test_diagonal(self):
        a = np.diag([1.0, 0.0])
        p = projectors(a, a)
        assert_array_equal(p.e_proj, np.diag([0, 1]))
        assert_array_equal(p.f_proj, np.diag([0, 1]))

    def test_traces(self, rng):
        a = low_rank(rng, 6, 4, 2)
        rank = np.linalg.matrix_rank(a)
        p = projectors(a, oracle_pinv(a))
        assert abs(np.trace(p.e_proj) - (6 - rank)) <= 1e-10
        assert abs(np.trace(p.f_proj) - (4 - rank)) <= 1e-10

    def test_idempotent_hermitian(self, rng):
        a = low_rank(rng, 8, 5, 3)
        p = projectors(a, pinv(a).pinv)
        for proj in (p.e_proj, p.f_proj):
            scale = max(1, np.linalg.norm(proj))
            assert np.linalg.norm(proj @ proj - proj) <= 1e-10 * scale
            assert np.linalg.norm(proj - proj.conj().T) <= 1e-10 * scale

    def test_mismatch(self):
        with pytest.raises(DimensionError):
            projectors(np.ones((2, 3)), np.ones((2, 3)))


class TestRangeInclusion:
    def test_zero(self, rng):
        a = cnormal(rng, 4, 3)
        assert range_inclusion(np.zeros((4, 2)), a, pinv(a).pinv) == (True, 0.0)

    def test_constructed(self, rng):
        a = low_rank(rng, 6, 5, 2)
        ok, res = range_inclusion(a @ cnormal(rng, 5, 3), a, pinv(a).pinv)
        assert ok and res <= 1e-12

    def test_orthogonal(self):
        a = np.diag([1.0, 0.0])
        ok, res = range_inclusion(np.array([[0.0], [1.0]]), a, a)
        assert not ok
        assert res == 1.0

    def test_mismatch(self):
        with pytest.raises(DimensionError):
            range_inclusion(np.ones((3, 1)), np.eye(2), np.eye(2))


class TestPenroseCheck:
    def test_identity(self):
        rep = penrose_check(np.eye(2), np.eye(2))
        assert rep.residuals == (0.0, 0.0, 0.0, 0.0)
        assert rep.all_pass

    def test_second_equation_fails(self):
        rep = penrose_check(np.diag([1.0, 0.0]), np.array([[1.0, 0.0], [0.0, 5.0]]))
        assert rep.passed == (True, False, True, True)
        # ZAZ - Z = -5 e2 e2^T, ||Z|| = sqrt(26)
        assert rep.residuals[1] == pytest.approx(5 / np.sqrt(26))

    def test_oracle(self, rng):
        a = low_rank(rng, 9, 6, 4)
        assert penrose_check(a, oracle_pinv(a), 1e-10).all_pass

    def test_mismatch(self):
        with pytest.raises(DimensionError):
            penrose_check(np.ones((2, 3)), np.ones((2, 3)))


class TestHermitianResidual:
    def test_hermitian(self):
        assert hermitian_residual(np.array([[1, 1j], [-1j, 2]])) == 0.0

    def test_nilpotent(self):
        assert hermitian_residual(np.array([[0, 1], [0, 0]])) == pytest.approx(np.sqrt(2))

    def test_perturbed(self, rng):
        g = cnormal(rng, 5, 5)
        h = g + g.conj().T
        skew = 1e-8 * g
        measured = hermitian_residual(h + skew)
        expected = np.linalg.norm(skew - skew.conj().T) / np.linalg.norm(h + skew)
        assert measured == pytest.approx(expected, rel=1e-6)

    def test_non_square(self):
        with pytest.raises(DimensionError):
            hermitian_residual(np.ones((2, 3)))


# property tests over seeded random matrices


@st.composite
def matrices(draw):
    seed = draw(st.integers(0, 2**32 - 1))
    m = draw(st.integers(1, 12))
    n = draw(st.integers(1, 12))
    k = draw(st.integers(0, min(m, n)))
    rng = np.random.default_rng(seed)
    # singular values in [0.1, 10] keep the nonzero part well conditioned
    p, _ = np.linalg.qr(cnormal(rng, m, m))
    q, _ = np.linalg.qr(cnormal(rng, n, n))
    s = np.exp(rng.uniform(np.log(0.1), np.log(10), k))
    return (p[:, :k] * s) @ q[:, :k].conj().T


@given(matrices())
def test_involution(a):
    z = pinv(a).pinv
    assert np.linalg.norm(pinv(z).pinv - a) <= 1e-10 * max(1, np.linalg.norm(a))


@given(matrices())
def test_adjoint_commutes(a):
    z = pinv(a).pinv
    za = pinv(a.conj().T).pinv
    assert np.linalg.norm(za - z.conj().T) <= 1e-12 * max(1, np.linalg.norm(z))


@given(matrices())
def test_penrose_always_passes(a):
    assert pinv(a).penrose.all_pass


@given(matrices())
def test_projectors_annihilate(a):
    p = projectors(a, pinv(a).pinv)
    scale = max(1, np.linalg.norm(a))
    assert np.linalg.norm(p.e_proj @ a) <= 1e-12 * scale
    assert np.linalg.norm(a @ p.f_proj) <= 1e-12 * scale


@given(matrices(), st.integers(1, 4), st.integers(0, 2**32 - 1))
def test_products_in_range(a, cols, seed):
    g = cnormal(np.random.default_rng(seed), a.shape[1], cols)
    ok, res = range_inclusion(a @ g, a, pinv(a).pinv)
    assert ok and res <= 1e-12
