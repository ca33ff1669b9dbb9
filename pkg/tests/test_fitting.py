import numpy as np
import pytest

from splinetok import (
    FitSolver,
    ShapeError,
    build_basis_matrix,
    fit,
    fit_conditioned,
    make_clamped_knots,
    residual_mse,
)


def solver(num_samples, basis_count, degree, lam, grid=None):
    if grid is None:
        grid = np.arange(1, num_samples + 1) / num_samples
    basis = build_basis_matrix(make_clamped_knots(basis_count, degree), grid)
    return FitSolver.build(basis, lam)


def ridge_objective(phi, lam, a, c):
    return float(np.sum((phi @ c - a) ** 2) + lam * np.sum(c**2))


class TestFit:
    def test_degree_zero_identity(self):
        n = 8
        mid = (np.arange(n) + 0.5) / n
        s = solver(n, n, 0, 0.0, grid=mid)
        a = np.linspace(-1, 1, n).reshape(-1, 1)
        c = fit(s, a)
        np.testing.assert_array_equal(c.values, a.T)

    def test_constant_input(self):
        s = solver(50, 7, 3, 0.0)
        c = fit(s, np.full((50, 2), 0.7))
        np.testing.assert_allclose(c.values, 0.7, atol=1e-10)

    @pytest.mark.parametrize("n", [5, 8, 15])
    def test_exact_recovery(self, n):
        rng = np.random.default_rng(n)
        s = solver(100, n, 3, 0.0)
        c_star = rng.uniform(-1, 1, size=(3, n))
        actions = s.basis.matrix @ c_star.T
        c = fit(s, actions)
        assert np.abs(c.values - c_star).max() < 1e-8

    def test_under_determined_rejected(self):
        with pytest.raises(ShapeError):
            solver(4, 5, 3, 0.0)

    def test_shape_errors(self):
        s = solver(20, 5, 3, 0.0)
        with pytest.raises(ShapeError):
            fit(s, np.zeros((19, 2)))
        with pytest.raises(ValueError):
            fit(s, np.full((20, 2), np.nan))

    def test_solver_pseudo_inverse_when_unregularized(self):
        s = solver(30, 6, 2, 0.0)
        np.testing.assert_allclose(
            s.solver_matrix @ s.basis.matrix, np.eye(6), atol=1e-8
        )

    def test_ridge_shrinks_zero_input_to_zero(self):
        for lam in (0.0, 1e-6, 1e-2, 1.0):
            s = solver(25, 6, 3, lam)
            c = fit(s, np.zeros((25, 1)))
            np.testing.assert_allclose(c.values, 0.0, atol=1e-14)

    def test_lambda_continuity(self):
        rng = np.random.default_rng(3)
        a = rng.normal(size=(40, 1))
        prev = fit(solver(40, 8, 3, 0.0), a).values
        for lam in (1e-10, 1e-8, 1e-6):
            cur = fit(solver(40, 8, 3, lam), a).values
            assert np.abs(cur - prev).max() < 1e-3
            prev = cur

    def test_projection_idempotence(self):
        rng = np.random.default_rng(11)
        s = solver(60, 9, 3, 0.0)
        c1 = fit(s, rng.normal(size=(60, 2)))
        decoded = s.basis.matrix @ c1.values.T
        c2 = fit(s, decoded)
        assert np.abs(c2.values - c1.values).max() < 1e-10


class TestFitConditioned:
    def test_constant_equal_to_pin(self):
        s = solver(30, 6, 3, 0.0)
        c = fit_conditioned(s, np.full((30, 1), 0.5), np.array([0.5]))
        assert c.pinned_first[0] == 0.5
        np.testing.assert_allclose(c.values, 0.5, atol=1e-10)

    def test_decoded_curve_starts_at_pin(self):
        rng = np.random.default_rng(5)
        s = solver(40, 8, 3, 1e-6)
        c = fit_conditioned(s, rng.normal(size=(40, 3)), np.full(3, 0.5))
        basis0 = build_basis_matrix(s.basis.knot_vector, np.array([0.0]))
        start = basis0.matrix @ c.full_values().T
        np.testing.assert_allclose(start[0], 0.5, atol=1e-12)

    def test_conditioned_exact_recovery(self):
        rng = np.random.default_rng(9)
        s = solver(100, 8, 3, 0.0)
        c_star = rng.uniform(-1, 1, size=(2, 8))
        actions = s.basis.matrix @ c_star.T
        c = fit_conditioned(s, actions, c_star[:, 0])
        assert np.abs(c.values - c_star[:, 1:]).max() < 1e-8

    def test_pin_shape_error(self):
        s = solver(20, 5, 2, 0.0)
        with pytest.raises(ShapeError):
            fit_conditioned(s, np.zeros((20, 2)), np.zeros(3))


class TestResidualMse:
    def test_zero_on_representable(self):
        rng = np.random.default_rng(2)
        s = solver(50, 6, 3, 0.0)
        actions = s.basis.matrix @ rng.normal(size=(6, 1))
        assert residual_mse(s, actions, fit(s, actions)) < 1e-12

    def test_single_basis_hand_case(self):
        grid = np.array([0.0, 1.0])
        s = solver(2, 1, 0, 0.0, grid=grid)
        a = np.array([[0.0], [1.0]])
        c = fit(s, a)
        np.testing.assert_allclose(c.values, [[0.5]])
        assert residual_mse(s, a, c) == pytest.approx(0.25)

    def test_monotone_in_lambda(self):
        rng = np.random.default_rng(4)
        a = rng.normal(size=(30, 1))
        values = []
        for lam in (0.0, 1e-6, 1e-3, 1e-1):
            s = solver(30, 6, 3, lam)
            values.append(residual_mse(s, a, fit(s, a)))
        assert all(b >= a_ - 1e-15 for a_, b in zip(values, values[1:]))
        assert all(v >= 0 for v in values)

    def test_shape_mismatch(self):
        s = solver(20, 5, 2, 0.0)
        c = fit(s, np.zeros((20, 2)))
        with pytest.raises(ShapeError):
            residual_mse(s, np.zeros((20, 3)), c)


class TestGradientOracle:
    def test_closed_form_zeroes_objective_gradient(self):
        rng = np.random.default_rng(42)
        worst = 0.0
        for _ in range(50):
            n = int(rng.integers(4, 12))
            t = int(rng.integers(n, 80))
            lam = float(rng.choice([0.0, 1e-6, 1e-3, 1e-1]))
            p = int(rng.integers(1, min(4, n)))
            s = solver(t, n, p, lam)
            a = rng.normal(size=t)
            c = s.solver_matrix @ a
            eps = 1e-6
            for _ in range(20):
                direction = rng.normal(size=n)
                direction /= np.linalg.norm(direction)
                plus = ridge_objective(s.basis.matrix, lam, a, c + eps * direction)
                minus = ridge_objective(s.basis.matrix, lam, a, c - eps * direction)
                worst = max(worst, abs(plus - minus) / (2 * eps))
        assert worst < 1e-6
