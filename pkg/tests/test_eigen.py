import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qve import eigen
from qve.errors import (
    ComplexDominantError,
    NoConvergenceError,
    NotNonnegativeError,
    ReducibleMatrixError,
    ShapeMismatchError,
)


def random_positive_matrix(seed, n):
    rng = np.random.default_rng(seed)
    return rng.uniform(0.05, 1.0, size=(n, n))


class TestIrreducibility:
    def test_single_node(self):
        assert eigen.is_irreducible([[0.0]])

    def test_block_diagonal_reducible(self):
        M = np.array([[1.0, 0.0], [0.0, 1.0]])
        assert not eigen.is_irreducible(M)

    def test_cycle_irreducible(self):
        M = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert eigen.is_irreducible(M)

    def test_one_way_chain_reducible(self):
        M = np.array([[0.0, 1.0], [0.0, 0.0]])
        assert not eigen.is_irreducible(M)


class TestPerronPair:
    def test_symmetric_example(self):
        pair = eigen.perron_pair([[2.0, 1.0], [1.0, 2.0]])
        assert abs(pair.value - 3.0) < 1e-12
        np.testing.assert_allclose(pair.right, [0.5, 0.5], atol=1e-12)
        np.testing.assert_allclose(pair.left, [0.5, 0.5], atol=1e-12)

    def test_permutation_matrix(self):
        pair = eigen.perron_pair([[0.0, 1.0], [1.0, 0.0]])
        assert abs(pair.value - 1.0) < 1e-12
        np.testing.assert_allclose(pair.right, [0.5, 0.5], atol=1e-12)

    def test_one_by_one(self):
        pair = eigen.perron_pair([[1.5]])
        assert pair.value == 1.5
        np.testing.assert_array_equal(pair.right, [1.0])

    def test_not_nonnegative(self):
        with pytest.raises(NotNonnegativeError):
            eigen.perron_pair([[1.0, -0.1], [0.5, 1.0]])

    def test_reducible(self):
        with pytest.raises(ReducibleMatrixError):
            eigen.perron_pair(np.eye(3))

    def test_rejects_non_square(self):
        with pytest.raises(ShapeMismatchError):
            eigen.perron_pair(np.ones((2, 3)))

    @pytest.mark.parametrize("seed,n", [(0, 2), (1, 4), (2, 7), (3, 12)])
    def test_eigen_residuals_and_positivity(self, seed, n):
        M = random_positive_matrix(seed, n)
        pair = eigen.perron_pair(M, eig_tol=1e-12)
        scale = np.abs(M).sum(axis=1).max()
        assert np.max(np.abs(M @ pair.right - pair.value * pair.right)) <= 1e-12 * scale
        assert np.max(np.abs(pair.left @ M - pair.value * pair.left)) <= 1e-12 * scale
        assert pair.right.min() > 0
        assert pair.left.min() > 0
        assert abs(pair.right.sum() - 1.0) < 1e-12
        assert abs(pair.left.sum() - 1.0) < 1e-12

    def test_power_method_path_matches_dense(self):
        M = random_positive_matrix(7, 80)
        dense = eigen.perron_pair(M, power_threshold=1000)
        power = eigen.perron_pair(M, eig_tol=1e-13, power_threshold=64)
        assert abs(dense.value - power.value) < 1e-9 * dense.value
        np.testing.assert_allclose(power.right, dense.right, atol=1e-10)
        np.testing.assert_allclose(power.left, dense.left, atol=1e-10)

    def test_power_method_budget_exhaustion(self):
        M = np.array([[1.0, 2.0], [3.0, 4.0]])
        with pytest.raises(NoConvergenceError):
            eigen.perron_pair(M, power_threshold=1, power_budget=1)


class TestMaximalEigenvector:
    def test_agrees_with_perron_on_nonnegative(self):
        M = random_positive_matrix(11, 5)
        mx = eigen.maximal_eigenvector(M)
        pp = eigen.perron_pair(M)
        assert abs(mx.value - pp.value) < 1e-12
        np.testing.assert_allclose(mx.right, pp.right, atol=1e-12)
        np.testing.assert_allclose(mx.left, pp.left, atol=1e-12)

    def test_diagonal(self):
        pair = eigen.maximal_eigenvector(np.diag([3.0, 1.0]))
        assert pair.value == 3.0
        np.testing.assert_allclose(pair.right, [1.0, 0.0], atol=1e-15)

    def test_triangular_mixed_sign(self):
        pair = eigen.maximal_eigenvector([[1.0, -2.0], [0.0, 0.5]])
        assert abs(pair.value - 1.0) < 1e-14
        np.testing.assert_allclose(pair.right, [1.0, 0.0], atol=1e-14)

    def test_complex_dominant_raises(self):
        with pytest.raises(ComplexDominantError):
            eigen.maximal_eigenvector([[0.0, -1.0], [1.0, 0.0]])

    def test_negative_dominant_is_fine(self):
        pair = eigen.maximal_eigenvector([[-3.0, 0.0], [0.0, -5.0]])
        assert pair.value == -3.0


class TestPseudoinverse:
    def test_diagonal_rank_deficient(self):
        out = eigen.pseudoinverse(np.diag([2.0, 0.0]))
        np.testing.assert_allclose(out, np.diag([0.5, 0.0]), atol=1e-15)

    def test_invertible_matches_inverse(self):
        M = random_positive_matrix(3, 4) + 3 * np.eye(4)
        np.testing.assert_allclose(eigen.pseudoinverse(M), np.linalg.inv(M), atol=1e-10)

    def test_rank_one_all_ones(self):
        out = eigen.pseudoinverse(np.ones((2, 2)))
        np.testing.assert_allclose(out, np.full((2, 2), 0.25), atol=1e-14)

    def test_zero_matrix(self):
        np.testing.assert_array_equal(eigen.pseudoinverse(np.zeros((3, 3))), np.zeros((3, 3)))

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(seed=st.integers(0, 10_000), n=st.integers(1, 6), rank=st.integers(0, 6))
    def test_penrose_identities(self, seed, n, rank):
        rng = np.random.default_rng(seed)
        r = min(rank, n)
        M = rng.normal(size=(n, r)) @ rng.normal(size=(r, n)) if r else np.zeros((n, n))
        P = eigen.pseudoinverse(M)
        atol = 1e-10 * max(1.0, np.abs(M).max() ** 2)
        np.testing.assert_allclose(M @ P @ M, M, atol=atol)
        np.testing.assert_allclose(P @ M @ P, P, atol=atol)
        np.testing.assert_allclose((M @ P).T, M @ P, atol=atol)
        np.testing.assert_allclose((P @ M).T, P @ M, atol=atol)
