import numpy as np
import pytest
from scipy.interpolate import BSpline as ScipyBSpline

from splinetok import (
    DegreeError,
    DomainError,
    ShapeError,
    build_basis_matrix,
    eval_basis,
    eval_curve,
    make_clamped_knots,
)


def naive_cox_de_boor(knots, n, p, u, right_end):
    """Textbook recursive definition, used as an independent oracle."""
    if p == 0:
        if knots[n] <= u < knots[n + 1]:
            return 1.0
        if right_end and u == knots[n + 1] == knots[-1] and knots[n] < knots[n + 1]:
            # u = 1 joins the last non-degenerate interval
            if all(knots[m] == knots[m + 1] for m in range(n + 1, len(knots) - 1)):
                return 1.0
        return 0.0
    total = 0.0
    den = knots[n + p] - knots[n]
    if den > 0:
        total += (u - knots[n]) / den * naive_cox_de_boor(knots, n, p - 1, u, right_end)
    den = knots[n + p + 1] - knots[n + 1]
    if den > 0:
        total += (knots[n + p + 1] - u) / den * naive_cox_de_boor(
            knots, n + 1, p - 1, u, right_end
        )
    return total


class TestMakeClampedKnots:
    def test_degree_zero(self):
        kv = make_clamped_knots(5, 0)
        np.testing.assert_allclose(kv.knots, [0.0, 0.2, 0.4, 0.6, 0.8, 1.0])

    def test_no_interior(self):
        kv = make_clamped_knots(2, 1)
        np.testing.assert_allclose(kv.knots, [0, 0, 1, 1])

    def test_cubic_like(self):
        kv = make_clamped_knots(4, 2)
        np.testing.assert_allclose(kv.knots, [0, 0, 0, 0.5, 1, 1, 1])

    @pytest.mark.parametrize("n,p", [(5, 0), (8, 3), (16, 4), (2, 1)])
    def test_against_reference_generator(self, n, p):
        # scipy's design matrix accepts any valid knot vector; we only need
        # the count identity and the clamped runs here
        kv = make_clamped_knots(n, p)
        assert len(kv.knots) == n + p + 1
        assert np.all(kv.knots[: p + 1] == 0.0)
        assert np.all(kv.knots[-(p + 1):] == 1.0)
        assert np.all(np.diff(kv.knots) >= 0)
        interior = kv.knots[p + 1: -(p + 1)]
        np.testing.assert_allclose(interior, np.arange(1, n - p) / (n - p))

    @pytest.mark.parametrize("n,p", [(3, 3), (3, 5), (2, -1)])
    def test_degree_out_of_range(self, n, p):
        with pytest.raises(DegreeError):
            make_clamped_knots(n, p)


class TestEvalBasis:
    def test_linear_interpolation(self):
        np.testing.assert_allclose(eval_basis(make_clamped_knots(2, 1), 0.5), [0.5, 0.5])

    def test_degree_zero_indicator(self):
        np.testing.assert_allclose(eval_basis(make_clamped_knots(5, 0), 0.3), [0, 1, 0, 0, 0])

    def test_clamped_right_endpoint(self):
        np.testing.assert_allclose(eval_basis(make_clamped_knots(4, 2), 1.0), [0, 0, 0, 1])

    def test_clamped_left_endpoint(self):
        phi = eval_basis(make_clamped_knots(7, 3), 0.0)
        assert phi[0] == 1.0
        assert np.all(phi[1:] == 0.0)

    @pytest.mark.parametrize("u", [-0.1, 1.1, 2.0])
    def test_domain_error(self, u):
        with pytest.raises(DomainError):
            eval_basis(make_clamped_knots(4, 2), u)

    @pytest.mark.parametrize("n,p", [(4, 2), (6, 3), (9, 4), (5, 1)])
    def test_matches_naive_recursion(self, n, p):
        kv = make_clamped_knots(n, p)
        for u in np.linspace(0, 1, 23):
            got = eval_basis(kv, u)
            want = [naive_cox_de_boor(kv.knots, i, p, u, right_end=True) for i in range(n)]
            np.testing.assert_allclose(got, want, atol=1e-13)

    @pytest.mark.parametrize("n,p", [(6, 2), (10, 3)])
    def test_matches_scipy_design_matrix(self, n, p):
        kv = make_clamped_knots(n, p)
        grid = np.linspace(0, 1, 57)
        ours = build_basis_matrix(kv, grid).matrix
        ref = ScipyBSpline.design_matrix(grid, kv.knots, p).toarray()
        np.testing.assert_allclose(ours, ref, atol=1e-13)


class TestBuildBasisMatrix:
    def test_degree_zero_identity_on_midpoints(self):
        n = 6
        kv = make_clamped_knots(n, 0)
        mid = (np.arange(n) + 0.5) / n
        basis = build_basis_matrix(kv, mid)
        np.testing.assert_array_equal(basis.matrix, np.eye(n))

    def test_linear_case(self):
        basis = build_basis_matrix(make_clamped_knots(2, 1), np.array([0, 0.5, 1.0]))
        np.testing.assert_allclose(basis.matrix, [[1, 0], [0.5, 0.5], [0, 1]])

    def test_partition_of_unity_dense(self):
        basis = build_basis_matrix(make_clamped_knots(5, 3), np.linspace(0, 1, 100))
        np.testing.assert_allclose(basis.matrix.sum(axis=1), 1.0, atol=1e-12)

    def test_rows_match_eval_basis(self):
        kv = make_clamped_knots(7, 2)
        grid = np.linspace(0, 1, 33)
        basis = build_basis_matrix(kv, grid)
        rows = np.array([eval_basis(kv, u) for u in grid])
        np.testing.assert_array_equal(basis.matrix, rows)

    def test_cache_returns_same_object(self):
        kv = make_clamped_knots(5, 2)
        grid = np.linspace(0, 1, 11)
        assert build_basis_matrix(kv, grid) is build_basis_matrix(kv, grid)

    def test_grid_domain_error(self):
        with pytest.raises(DomainError):
            build_basis_matrix(make_clamped_knots(4, 1), np.array([0.0, 1.5]))


class TestInvariants:
    def test_partition_of_unity_sweep(self):
        grid = np.linspace(0, 1, 1000)
        for p in range(5):
            for n in range(p + 1, 17):
                m = build_basis_matrix(make_clamped_knots(n, p), grid).matrix
                assert np.abs(m.sum(axis=1) - 1).max() < 1e-12
                assert m.min() >= 0.0
                assert m.max() <= 1.0 + 1e-15

    def test_local_support(self):
        kv = make_clamped_knots(8, 3)
        grid = np.linspace(0, 1, 400)
        m = build_basis_matrix(kv, grid).matrix
        for n in range(8):
            lo, hi = kv.knots[n], kv.knots[n + 3 + 1]
            outside = (grid < lo) | (grid > hi)
            assert np.all(m[outside, n] == 0.0)

    def test_clamped_endpoint_curve(self):
        rng = np.random.default_rng(7)
        for p in (1, 2, 3, 4):
            n = p + 3
            basis = build_basis_matrix(make_clamped_knots(n, p), np.array([0.0, 0.37, 1.0]))
            c = rng.normal(size=n)
            y = eval_curve(basis, c)
            assert abs(y[0] - c[0]) < 1e-12
            assert abs(y[-1] - c[-1]) < 1e-12


class TestEvalCurve:
    def test_constant_control_points(self):
        basis = build_basis_matrix(make_clamped_knots(6, 3), np.linspace(0, 1, 50))
        np.testing.assert_allclose(eval_curve(basis, np.full(6, 0.7)), 0.7, atol=1e-12)

    def test_degree_zero_identity(self):
        n = 5
        mid = (np.arange(n) + 0.5) / n
        basis = build_basis_matrix(make_clamped_knots(n, 0), mid)
        c = np.array([3.0, -1.0, 0.5, 2.0, -4.0])
        np.testing.assert_array_equal(eval_curve(basis, c), c)

    def test_linear_interpolation(self):
        basis = build_basis_matrix(make_clamped_knots(2, 1), np.array([0, 0.5, 1.0]))
        np.testing.assert_allclose(eval_curve(basis, [0.0, 1.0]), [0, 0.5, 1])

    def test_dimension_mismatch(self):
        basis = build_basis_matrix(make_clamped_knots(4, 2), np.linspace(0, 1, 10))
        with pytest.raises(ShapeError):
            eval_curve(basis, np.zeros(5))
