import numpy as np
import pytest

from subsetscreen import (
    min_norm_least_squares,
    power_method_lambda_max,
    standardize,
)

from _support import jacobi_max_eigenvalue


class TestStandardize:
    def test_two_point_column(self):
        prob = standardize(np.array([[1.0], [3.0]]), np.array([5.0, 7.0]))
        np.testing.assert_allclose(prob.X[:, 0], [-1.0, 1.0])
        np.testing.assert_allclose(prob.y, [-1.0, 1.0])

    def test_already_standardized_input_unchanged(self):
        rng = np.random.default_rng(1)
        raw = rng.standard_normal((25, 4))
        raw -= raw.mean(axis=0)
        raw *= np.sqrt(25 / np.einsum("ij,ij->j", raw, raw))
        y = rng.standard_normal(25)
        y -= y.mean()
        prob = standardize(raw, y)
        np.testing.assert_allclose(prob.X, raw, atol=1e-12)
        np.testing.assert_allclose(prob.y, y, atol=1e-12)

    def test_idempotent(self):
        rng = np.random.default_rng(2)
        X = 3.0 * rng.standard_normal((20, 5)) + 1.5
        y = rng.standard_normal(20) + 4.0
        once = standardize(X, y)
        twice = standardize(once.X, once.y)
        np.testing.assert_allclose(twice.X, once.X, atol=1e-10)
        np.testing.assert_allclose(twice.y, once.y, atol=1e-10)

    def test_column_conventions(self):
        rng = np.random.default_rng(3)
        prob = standardize(rng.standard_normal((40, 7)) * 5 + 2, rng.standard_normal(40))
        n = prob.n
        assert np.all(np.abs(prob.X.sum(axis=0)) <= 1e-8 * n)
        np.testing.assert_allclose(
            np.einsum("ij,ij->j", prob.X, prob.X), np.full(7, n), rtol=1e-8
        )
        assert abs(prob.y.sum()) <= 1e-8 * n

    def test_degenerate_column_flagged_and_zeroed(self):
        rng = np.random.default_rng(4)
        X = rng.standard_normal((15, 3))
        X[:, 1] = 7.0
        prob = standardize(X, rng.standard_normal(15))
        assert prob.degenerate.tolist() == [False, True, False]
        assert prob.col_scales[1] == 1.0
        np.testing.assert_array_equal(prob.X[:, 1], 0.0)

    def test_errors(self):
        with pytest.raises(ValueError):
            standardize(np.ones((3, 2)), np.ones(4))
        with pytest.raises(ValueError):
            standardize(np.ones((1, 2)), np.ones(1))
        bad = np.ones((4, 2))
        bad[0, 0] = np.nan
        with pytest.raises(ValueError):
            standardize(bad, np.ones(4))
        with pytest.raises(ValueError):
            standardize(np.ones((4, 2)) + np.arange(4)[:, None], np.array([1.0, 2.0, np.inf, 0.0]))


class TestPowerMethod:
    def test_orthogonal_columns(self):
        X = np.array([[1.0, 1.0], [1.0, -1.0], [-1.0, 1.0], [-1.0, -1.0]])
        assert power_method_lambda_max(X) == pytest.approx(4.0, rel=1e-10)

    def test_diagonal(self):
        assert power_method_lambda_max(np.diag([1.0, 2.0])) == pytest.approx(4.0, rel=1e-10)

    def test_matches_jacobi_oracle(self):
        rng = np.random.default_rng(5)
        X = rng.standard_normal((6, 4))
        expected = jacobi_max_eigenvalue(X.T @ X)
        assert power_method_lambda_max(X) == pytest.approx(expected, rel=1e-6)

    def test_rayleigh_lower_bound(self):
        rng = np.random.default_rng(6)
        X = rng.standard_normal((30, 12))
        lam = power_method_lambda_max(X)
        for _ in range(100):
            v = rng.standard_normal(12)
            quotient = float(v @ (X.T @ (X @ v))) / float(v @ v)
            assert lam >= quotient * (1 - 1e-12)

    def test_spectral_constant_dominates(self):
        # c I - X'X must be positive semidefinite for the thresholded
        # steps to be monotone.
        for seed in range(10):
            rng = np.random.default_rng(100 + seed)
            X = rng.standard_normal((12, 6))
            prob = standardize(X, rng.standard_normal(12))
            shifted = prob.c * np.eye(6) - prob.X.T @ prob.X
            min_eig = -jacobi_max_eigenvalue(-shifted)
            assert min_eig >= -1e-8 * prob.c

    def test_zero_matrix(self):
        assert power_method_lambda_max(np.zeros((4, 3))) == 0.0

    def test_iteration_cap_warns_and_returns_estimate(self):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((10, 6))
        with pytest.warns(RuntimeWarning, match="did not converge"):
            estimate = power_method_lambda_max(X, rel_tol=0.0, max_iter=3)
        assert estimate > 0.0


class TestMinNormLeastSquares:
    def test_identity(self):
        np.testing.assert_allclose(
            min_norm_least_squares(np.eye(3), np.array([1.0, 2.0, 3.0])),
            [1.0, 2.0, 3.0],
        )

    def test_single_column(self):
        beta = min_norm_least_squares(np.array([[1.0], [1.0]]), np.array([1.0, 3.0]))
        assert beta == pytest.approx([2.0])

    def test_duplicate_columns_split_evenly(self):
        A = np.array([[1.0, 1.0], [0.0, 0.0]])
        beta = min_norm_least_squares(A, np.array([2.0, 0.0]))
        np.testing.assert_allclose(beta, [1.0, 1.0], atol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            min_norm_least_squares(np.ones((3, 2)), np.ones(4))

    def test_rank_deficient_residual_orthogonality(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.integers(5, 20))
            p = int(rng.integers(2, 10))
            A = rng.standard_normal((n, p))
            # duplicate a column to force rank deficiency
            dup_from = int(rng.integers(0, p))
            dup_to = int(rng.integers(0, p))
            A[:, dup_to] = A[:, dup_from]
            y = rng.standard_normal(n)
            beta = min_norm_least_squares(A, y)
            resid = y - A @ beta
            bound = 1e-8 * np.linalg.norm(y) * np.abs(A).sum(axis=0).max()
            assert np.max(np.abs(A.T @ resid)) <= max(bound, 1e-12)

    def test_matches_svd_min_norm_solution(self):
        # The minimum-norm minimizer is unique, so an SVD-based route
        # must land on the same vector.
        rng = np.random.default_rng(8)
        for _ in range(50):
            A = rng.standard_normal((12, 6))
            A[:, 4] = A[:, 1] - 2.0 * A[:, 2]
            y = rng.standard_normal(12)
            mine = min_norm_least_squares(A, y)
            ref, *_ = np.linalg.lstsq(A, y, rcond=None)
            np.testing.assert_allclose(mine, ref, atol=1e-8)

    def test_empty_and_zero_matrices(self):
        assert min_norm_least_squares(np.zeros((3, 0)), np.zeros(3)).shape == (0,)
        np.testing.assert_array_equal(
            min_norm_least_squares(np.zeros((3, 2)), np.ones(3)), np.zeros(2)
        )
