import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import qve
from qve.errors import (
    NegativeEntryError,
    ReducibleMeanMatrixError,
    ShapeMismatchError,
    StochasticityViolationError,
)

from conftest import supercritical_problem, uneven_problem


def scalar_problem(beta):
    return qve.validate_problem([1.0 - beta], [[beta]])


FLAT2 = qve.validate_problem([0.5, 0.5], np.full((2, 4), 0.125))


class TestValidate:
    def test_scalar_valid(self):
        p = qve.validate_problem([0.25], [[0.75]], tol=1e-12)
        assert p.n == 1
        assert p.a[0] == 0.25
        assert p.B[0, 0] == 0.75

    def test_scalar_stochasticity_violation(self):
        with pytest.raises(StochasticityViolationError):
            qve.validate_problem([0.3], [[0.75]], tol=1e-12)

    def test_flat_two_type_valid(self):
        p = qve.validate_problem([0.5, 0.5], np.full((2, 4), 0.125), tol=1e-12)
        assert p.n == 2
        np.testing.assert_array_equal(p.a, [0.5, 0.5])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            qve.validate_problem([0.5, 0.5], np.full((2, 3), 0.1))
        with pytest.raises(ShapeMismatchError):
            qve.validate_problem([[0.5], [0.5]], np.full((2, 4), 0.125))

    def test_negative_entries(self):
        with pytest.raises(NegativeEntryError):
            qve.validate_problem([-0.1, 1.1], np.zeros((2, 4)))
        B = np.full((2, 4), 0.125)
        B[0, 1] = -0.125
        with pytest.raises(NegativeEntryError):
            qve.validate_problem([0.5, 0.75], B)

    def test_non_finite_rejected(self):
        with pytest.raises(NegativeEntryError):
            qve.validate_problem([np.nan], [[1.0]])

    def test_reprojection_makes_ones_a_solution(self):
        # a is replaced by e - B(e kron e), so the residual at e collapses
        # to rounding noise (exactly zero whenever the row masses round cleanly)
        rng = np.random.default_rng(5)
        for k in range(20):
            n = 2 + k % 4
            B = rng.uniform(0, 1, size=(n, n * n))
            B *= rng.uniform(0.05, 0.999, size=(n, 1)) / B.sum(axis=1, keepdims=True)
            a = np.clip(1.0 - B.sum(axis=1), 0.0, 1.0) + rng.uniform(-1e-13, 1e-13, size=n)
            p = qve.validate_problem(np.clip(a, 0.0, 1.0), B)
            assert qve.residual(p, p.e).norm1 <= 4 * n * np.finfo(float).eps

    def test_exact_zero_residual_at_ones_for_heavy_rows(self):
        # with branching mass >= 1/2 the re-projection is exact in IEEE
        p = scalar_problem(0.75)
        assert qve.residual(p, p.e).norm1 == 0.0
        assert qve.residual(FLAT2, FLAT2.e).norm1 == 0.0

    def test_arrays_immutable(self):
        p = scalar_problem(0.75)
        with pytest.raises(ValueError):
            p.a[0] = 0.5
        with pytest.raises(ValueError):
            p.B[0, 0] = 0.5


class TestBilinear:
    def test_zero_argument(self):
        u = np.zeros(2)
        np.testing.assert_array_equal(qve.apply_bilinear(FLAT2, u, FLAT2.e), np.zeros(2))

    def test_scalar_value(self):
        p = scalar_problem(0.75)
        np.testing.assert_allclose(qve.apply_bilinear(p, [2.0], [3.0]), [4.5])

    def test_row_sums(self):
        np.testing.assert_allclose(qve.apply_bilinear(FLAT2, FLAT2.e, FLAT2.e), [0.5, 0.5])

    def test_shape_mismatch(self):
        with pytest.raises(ShapeMismatchError):
            qve.apply_bilinear(FLAT2, [1.0, 2.0, 3.0], [1.0, 2.0])

    def test_column_convention(self):
        # a single nonzero at column j*n + k picks out u_j * v_k
        n = 3
        B = np.zeros((n, n * n))
        B[1, 2 * n + 0] = 1.0
        B[1, 1 * n + 1] = 0.0
        a = 1.0 - B.sum(axis=1)
        p = qve.validate_problem(a, B)
        u = np.array([2.0, 3.0, 5.0])
        v = np.array([7.0, 11.0, 13.0])
        out = qve.apply_bilinear(p, u, v)
        assert out[1] == u[2] * v[0]
        assert out[0] == 0.0

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(
        seed=st.integers(0, 10_000),
        n=st.integers(1, 5),
        alpha=st.floats(-2, 2, allow_nan=False),
        beta=st.floats(-2, 2, allow_nan=False),
    )
    def test_bilinearity(self, seed, n, alpha, beta):
        p = uneven_problem(n, seed)
        rng = np.random.default_rng(seed + 1)
        u, u2, v = rng.uniform(-1, 1, size=(3, n))
        lhs = qve.apply_bilinear(p, alpha * u + beta * u2, v)
        rhs = alpha * qve.apply_bilinear(p, u, v) + beta * qve.apply_bilinear(p, u2, v)
        np.testing.assert_allclose(lhs, rhs, atol=1e-13)
        lhs = qve.apply_bilinear(p, v, alpha * u + beta * u2)
        rhs = alpha * qve.apply_bilinear(p, v, u) + beta * qve.apply_bilinear(p, v, u2)
        np.testing.assert_allclose(lhs, rhs, atol=1e-13)


class TestContractions:
    def test_zero_vector_gives_zero_matrix(self):
        z = np.zeros(2)
        np.testing.assert_array_equal(qve.left_matrix(FLAT2, z), np.zeros((2, 2)))
        np.testing.assert_array_equal(qve.right_matrix(FLAT2, z), np.zeros((2, 2)))

    def test_scalar_contractions(self):
        p = scalar_problem(0.75)
        np.testing.assert_array_equal(qve.left_matrix(p, [1.0]), [[0.75]])
        np.testing.assert_array_equal(qve.right_matrix(p, [1.0]), [[0.75]])

    @settings(max_examples=40, deadline=None, derandomize=True)
    @given(seed=st.integers(0, 10_000), n=st.integers(1, 6))
    def test_contraction_consistency(self, seed, n):
        p = uneven_problem(n, seed)
        rng = np.random.default_rng(seed + 2)
        u, v = rng.uniform(-1, 1, size=(2, n))
        direct = qve.apply_bilinear(p, u, v)
        np.testing.assert_allclose(qve.left_matrix(p, u) @ v, direct, atol=1e-14)
        np.testing.assert_allclose(qve.right_matrix(p, v) @ u, direct, atol=1e-14)


class TestMeanMatrix:
    def test_scalar(self):
        np.testing.assert_array_equal(qve.mean_matrix(scalar_problem(0.75)), [[1.5]])

    def test_zero_branching(self):
        p = qve.validate_problem([1.0, 1.0], np.zeros((2, 4)))
        np.testing.assert_array_equal(qve.mean_matrix(p), np.zeros((2, 2)))

    def test_flat_two_type_hand_sum(self):
        # both contractions at e have every entry 2 * 0.125 = 0.25
        np.testing.assert_allclose(qve.mean_matrix(FLAT2), np.full((2, 2), 0.5))


class TestCriticality:
    @pytest.mark.parametrize(
        "beta,rho,label",
        [(0.75, 1.5, "supercritical"), (0.5, 1.0, "critical"), (0.25, 0.5, "subcritical")],
    )
    def test_scalar_classification(self, beta, rho, label):
        rep = qve.criticality(scalar_problem(beta), tol=1e-12)
        assert rep.classification == label
        assert abs(rep.rho - rho) < 1e-14

    def test_reducible_mean_matrix_reported(self):
        p = qve.validate_problem([1.0, 1.0], np.zeros((2, 4)))
        with pytest.raises(ReducibleMeanMatrixError):
            qve.criticality(p)


class TestResidual:
    def test_quadratic_root_scalar(self):
        # minimal root of 0.75 x^2 - x + 0.25 = 0 is 1/3
        p = scalar_problem(0.75)
        rep = qve.residual(p, [1.0 / 3.0])
        assert rep.norm1 <= 1e-15

    def test_at_zero(self):
        p = scalar_problem(0.75)
        rep = qve.residual(p, [0.0])
        np.testing.assert_allclose(rep.vector, [-0.25])
        assert rep.norm1 == 0.25

    def test_norm_is_sum_of_abs(self):
        p = uneven_problem(4, 3)
        x = np.linspace(0.1, 0.9, 4)
        rep = qve.residual(p, x)
        assert rep.norm1 == np.abs(rep.vector).sum()


class TestSurvivalMatrix:
    def test_zero_equals_mean_matrix(self):
        np.testing.assert_array_equal(
            qve.survival_matrix(FLAT2, np.zeros(2)), qve.mean_matrix(FLAT2)
        )

    @pytest.mark.parametrize("y,expected", [(2.0 / 3.0, 1.0), (0.5, 1.125)])
    def test_scalar_values(self, y, expected):
        # beta (2 - y) with beta = 0.75
        p = scalar_problem(0.75)
        np.testing.assert_allclose(qve.survival_matrix(p, [y]), [[expected]])

    def test_unit_spectral_radius_at_solution(self):
        for n, seed, rho in ((2, 11, 1.3), (4, 12, 1.6), (6, 13, 1.4)):
            p = supercritical_problem(n, seed, rho)
            ystar = qve.solve_newton(p).y
            H = qve.survival_matrix(p, ystar)
            assert abs(qve.spectral_radius(H) - 1.0) <= 1e-10

    def test_nonnegative_below_ones(self):
        p = uneven_problem(3, 9)
        rng = np.random.default_rng(1)
        for _ in range(5):
            y = rng.uniform(0, 1, size=3)
            assert (qve.survival_matrix(p, y) >= 0).all()


class TestJson:
    def test_round_trip_exact(self, tmp_path):
        p = uneven_problem(3, 17)
        path = tmp_path / "problem.json"
        qve.save_problem(p, path)
        q = qve.load_problem(path)
        np.testing.assert_array_equal(p.a, q.a)
        np.testing.assert_array_equal(p.B, q.B)
        assert p.n == q.n

    def test_dict_schema(self):
        d = qve.problem_to_dict(scalar_problem(0.75))
        assert set(d) == {"n", "a", "B"}
        assert d["n"] == 1
        assert isinstance(d["B"][0], list)

    def test_declared_n_checked(self):
        d = qve.problem_to_dict(scalar_problem(0.75))
        d["n"] = 2
        with pytest.raises(ShapeMismatchError):
            qve.problem_from_dict(d)

    def test_file_is_json(self, tmp_path):
        path = tmp_path / "p.json"
        qve.save_problem(FLAT2, path)
        data = json.loads(path.read_text())
        assert data["a"] == [0.5, 0.5]
