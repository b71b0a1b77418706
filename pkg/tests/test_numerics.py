import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from fracred.exceptions import DomainError, SingularMatrix, ValidationError
from fracred.numerics import NewtonConfig, gauss_solve, lu_solve, newton_solve, numeric_jacobian, principal_log


class TestLUSolve:
    def test_identity(self, rng):
        b = rng.normal(size=5) + 1j * rng.normal(size=5)
        assert_allclose(lu_solve(np.eye(5), b), b)

    def test_diagonal(self):
        assert_allclose(lu_solve(np.diag([2.0, 4.0]), np.array([2.0, 8.0])), [1.0, 2.0])

    def test_random_complex_recovers_x(self, rng):
        A = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
        x = rng.normal(size=8) + 1j * rng.normal(size=8)
        assert_allclose(lu_solve(A, A @ x), x, rtol=1e-11)

    def test_backward_error_on_well_conditioned(self, rng):
        for _ in range(100):
            n = int(rng.integers(2, 9))
            A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            if np.linalg.cond(A) > 1e6:
                continue
            b = rng.normal(size=n) + 1j * rng.normal(size=n)
            x = lu_solve(A, b)
            err = np.abs(A @ x - b).max() / (
                np.abs(A).sum(axis=1).max() * np.abs(x).max() + np.abs(b).max())
            assert err < 1e-12

    def test_needs_pivoting(self):
        A = np.array([[0.0, 1.0], [1.0, 0.0]])
        assert_allclose(lu_solve(A, np.array([3.0, 5.0])), [5.0, 3.0])

    def test_singular(self):
        with pytest.raises(SingularMatrix):
            lu_solve(np.zeros((3, 3)), np.ones(3))

    def test_relative_threshold(self):
        A = np.array([[1.0, 1.0], [1.0, 1.0 + 1e-17]])
        with pytest.raises(SingularMatrix):
            lu_solve(A, np.ones(2), rtol=1e-15)

    @pytest.mark.parametrize("A, b", [
        (np.ones((2, 3)), np.ones(2)),
        (np.eye(3), np.ones(2)),
        (np.array([[np.nan, 0], [0, 1]]), np.ones(2)),
    ])
    def test_bad_shapes_and_values(self, A, b):
        with pytest.raises(ValueError):
            lu_solve(A, b)


class TestGaussSolve:
    def test_matches_lapack(self, rng):
        A = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
        b = rng.normal(size=6) + 1j * rng.normal(size=6)
        assert_allclose(gauss_solve(A, b), lu_solve(A, b), rtol=1e-12)

    def test_extended_precision_residual(self, rng):
        A = (rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))).astype(np.clongdouble)
        x = (rng.normal(size=5) + 0j).astype(np.clongdouble)
        b = A @ x
        got = gauss_solve(A, b)
        assert got.dtype == np.clongdouble
        assert float(np.abs(got - x).max()) < 1e3 * float(np.finfo(np.longdouble).eps)

    def test_pivoting_and_singular(self):
        assert_allclose(gauss_solve(np.array([[0.0, 1.0], [1.0, 0.0]]), [3.0, 5.0]), [5.0, 3.0])
        with pytest.raises(SingularMatrix):
            gauss_solve(np.ones((2, 2)), [1.0, 1.0])
        with pytest.raises(ValueError):
            gauss_solve(np.ones((2, 3)), [1.0, 1.0])


class TestPrincipalLog:
    @pytest.mark.parametrize("w", [1e-3, 0.5, 1.0, 7.0, 1e3])
    def test_imaginary_axis(self, w):
        assert_allclose(principal_log(1j * w), np.log(w) + 0.5j * np.pi, rtol=1e-15)

    def test_one(self):
        assert principal_log(1.0) == 0

    @pytest.mark.parametrize("z", [-1.0, complex(-1.0, 0.0), complex(-1.0, -0.0), -2.5])
    def test_branch_cut_maps_to_plus_pi(self, z):
        out = principal_log(z)
        assert out.imag == np.pi
        assert_allclose(out.real, np.log(abs(z)))

    def test_zero(self):
        with pytest.raises(DomainError):
            principal_log(0j)

    def test_array(self):
        out = principal_log(np.array([1j, -1 - 0j, 1]))
        assert_allclose(out, [0.5j * np.pi, 1j * np.pi, 0])

    def test_exp_inverts(self, rng):
        r = np.exp(rng.uniform(-6, 6, 1000))
        z = r * np.exp(1j * rng.uniform(-np.pi, np.pi, 1000))
        L = principal_log(z)
        assert_allclose(np.exp(L), z, rtol=1e-14)
        assert np.all((L.imag > -np.pi) & (L.imag <= np.pi))

    @settings(max_examples=200, deadline=None)
    @given(st.complex_numbers(min_magnitude=1e-100, max_magnitude=1e100, allow_nan=False,
                              allow_infinity=False))
    def test_interval(self, z):
        L = principal_log(z)
        assert -np.pi < L.imag <= np.pi


class TestNewton:
    def test_scalar_root(self):
        x, r, ok = newton_solve(lambda x: x**2 - 4, [3.0])
        assert ok
        assert_allclose(x, [2.0], atol=1e-12)
        assert r < 1e-12

    def test_linear_system(self):
        f = lambda v: np.array([v[0] + v[1] - 3, v[0] - v[1] - 1])
        res = newton_solve(f, [0.0, 0.0])
        assert res.converged
        assert_allclose(res.x, [2.0, 1.0], atol=1e-12)
        assert res.n_iter <= 2

    @pytest.mark.parametrize("fun, x0", [
        (lambda x: np.array([np.exp(x[0]) - 3.0]), [0.0]),
        (lambda x: np.array([x[0] ** 3 - 2 * x[1], x[1] ** 2 - 4.0]), [1.0, 1.0]),
        (lambda x: np.array([np.sin(x[0]) - 0.5, x[0] * x[1] - 1.0]), [0.3, 2.0]),
    ])
    def test_quadratic_convergence(self, fun, x0):
        res = newton_solve(fun, x0, NewtonConfig(tol=1e-300, max_iter=30))
        h = [v for v in res.history if v > 1e-14]
        assert len(h) >= 4
        # e_{k+1} / e_k shrinks fast near the root
        ratios = [h[k + 1] / h[k] for k in range(len(h) - 3, len(h) - 1)]
        assert max(ratios) < 0.1

    def test_no_root_reports_best_iterate(self):
        res = newton_solve(lambda x: x**2 + 1.0, [0.5], NewtonConfig(max_iter=20))
        assert not res.converged
        assert np.isfinite(res.residual)
        assert res.residual >= 1.0

    def test_nonfinite_start(self):
        res = newton_solve(lambda x: np.array([np.nan]), [1.0])
        assert not res.converged and res.residual == np.inf

    def test_backtracking_escapes_overshoot(self):
        # plain Newton from x0=1.5 diverges on atan
        res = newton_solve(lambda x: np.arctan(x), [1.5])
        assert res.converged
        assert_allclose(res.x, [0.0], atol=1e-12)

    def test_jacobian_matches_analytic(self, rng):
        A = rng.normal(size=(3, 3))
        f = lambda x: A @ x + 0.5 * x**2
        x = rng.normal(size=3)
        assert_allclose(numeric_jacobian(f, x), A + np.diag(x), atol=1e-7)

    @pytest.mark.parametrize("kwargs", [{"tol": 0}, {"max_iter": 0}, {"fd_step": -1},
                                        {"backtrack": 1.0}])
    def test_config_validation(self, kwargs):
        with pytest.raises(ValidationError):
            NewtonConfig(**kwargs)
