import numpy as np
import pytest

from seriesflow import DimensionMismatchError, SingularMatrixError, lu_factor, lu_solve
from seriesflow.numerics import inf_norm


def reconstruct(fact):
    """P A = L U from the packed factors (successive-swap pivot format)."""
    n = fact.n
    lower = np.tril(fact.lu, -1) + np.eye(n)
    upper = np.triu(fact.lu)
    perm = np.eye(n)
    for k, p in enumerate(fact.piv):
        perm[[k, p]] = perm[[p, k]]
    return perm, lower @ upper


class TestLuFactor:
    def test_identity(self):
        fact = lu_factor(np.eye(3))
        assert fact.min_pivot == 1.0
        assert np.array_equal(fact.lu, np.eye(3))

    def test_permutation_matrix(self):
        fact = lu_factor(np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert fact.min_pivot == 1.0
        perm, prod = reconstruct(fact)
        assert np.allclose(perm @ np.array([[0.0, 1.0], [1.0, 0.0]]), prod)

    @pytest.mark.parametrize("seed", range(5))
    def test_random_reconstruction(self, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(8, 8))
        assert np.linalg.cond(a, np.inf) < 1e6
        perm, prod = reconstruct(lu_factor(a))
        assert inf_norm(perm @ a - prod) <= 1e-12 * inf_norm(a)

    def test_singular_raises_at_threshold(self):
        a = np.array([[1.0, 1.0], [1.0, 1.0]])
        with pytest.raises(SingularMatrixError):
            lu_factor(a, singular_threshold=1e-10 * inf_norm(a))

    def test_exactly_singular(self):
        with pytest.raises(SingularMatrixError) as exc:
            lu_factor(np.zeros((2, 2)), singular_threshold=1e-300)
        assert exc.value.min_pivot == 0.0

    def test_near_singular_allowed_with_zero_threshold(self):
        a = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-13]])
        fact = lu_factor(a, singular_threshold=0.0)
        assert fact.min_pivot == pytest.approx(1e-13, rel=1e-2)

    def test_not_square(self):
        with pytest.raises(DimensionMismatchError):
            lu_factor(np.ones((2, 3)))

    def test_non_finite(self):
        with pytest.raises(ValueError):
            lu_factor(np.array([[1.0, np.nan], [0.0, 1.0]]))


class TestLuSolve:
    def test_identity(self):
        fact = lu_factor(np.eye(4))
        rhs = np.array([1.0, -2.0, 3.0, 0.5])
        assert np.array_equal(lu_solve(fact, rhs), rhs)

    def test_diagonal(self):
        fact = lu_factor(np.diag([2.0, 4.0]))
        assert np.array_equal(lu_solve(fact, np.array([2.0, 8.0])), [1.0, 2.0])

    @pytest.mark.parametrize("seed", range(5))
    def test_residual_bound(self, seed):
        rng = np.random.default_rng(100 + seed)
        a = rng.normal(size=(12, 12))
        assert np.linalg.cond(a, np.inf) < 1e6
        rhs = rng.normal(size=12)
        x = lu_solve(lu_factor(a), rhs)
        assert inf_norm(a @ x - rhs) <= 1e-10 * (1.0 + inf_norm(rhs))

    def test_dimension_mismatch(self):
        fact = lu_factor(np.eye(3))
        with pytest.raises(DimensionMismatchError):
            lu_solve(fact, np.ones(4))

    def test_deterministic(self):
        rng = np.random.default_rng(7)
        a = rng.normal(size=(10, 10))
        rhs = rng.normal(size=10)
        x1 = lu_solve(lu_factor(a), rhs)
        x2 = lu_solve(lu_factor(a.copy()), rhs.copy())
        assert np.array_equal(x1, x2)


def test_inf_norm():
    assert inf_norm(np.array([[1.0, -2.0], [3.0, 4.0]])) == 7.0
    assert inf_norm(np.array([1.0, -5.0])) == 5.0
    assert inf_norm(np.array([])) == 0.0
