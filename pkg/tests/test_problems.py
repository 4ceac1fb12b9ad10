import math

import numpy as np
import pytest

from normdescent import (
    CoshProblem,
    QuadraticProblem,
    SymMatrix,
    cosh_eval,
    eigh,
    make_quadratic,
    noisy_grad,
    quad_eval,
)


def central_diff(f, x, h):
    """Finite-difference gradient oracle, coordinate by coordinate."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for i in range(x.size):
        e = np.zeros_like(x)
        e[i] = h
        g[i] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def assert_grad_matches_fd(value_fn, grad, x, rel=1e-6):
    h = 1e-5 * (1.0 + np.abs(x).max())
    fd = central_diff(value_fn, x, h)
    scale = max(1.0, np.abs(grad).max())
    assert np.abs(fd - grad).max() <= rel * scale


class TestMakeQuadratic:
    def test_isotropic_is_identity(self):
        p = make_quadratic(4, 1.0, 0.37, seed=2)
        assert np.abs(p.matrix.to_array() - np.eye(4)).max() <= 1e-10

    def test_axis_aligned_diagonal(self):
        p = make_quadratic(4, 10.0, 0.0, seed=2)
        assert np.array_equal(p.matrix.to_array(), np.diag([1.0, 1.0, 1.0, 10.0]))
        assert p.analysis.Linf_exact == pytest.approx(13.0)

    def test_spectrum_preserved_at_full_rotation(self):
        p = make_quadratic(8, 50.0, 1.0, seed=7)
        expected = np.concatenate([np.ones(7), [50.0]])
        assert np.abs(eigh(p.matrix).values - expected).max() <= 1e-9

    def test_axis_aligned_eigenvectors_have_unit_one_norm(self):
        p = make_quadratic(5, 20.0, 0.0, seed=3)
        vecs = eigh(p.matrix).vectors
        assert np.abs(np.abs(vecs).sum(axis=0) - 1.0).max() <= 1e-12

    def test_mean_absolute_eigenvalue(self):
        d, lam = 6, 30.0
        p = make_quadratic(d, lam, 0.5, seed=1)
        lam_bar = np.abs(eigh(p.matrix).values).mean()
        assert lam_bar == pytest.approx((d - 1 + lam) / d, rel=1e-9)

    def test_rejects_bad_args(self):
        with pytest.raises(ValueError):
            make_quadratic(1, 2.0, 0.0, seed=0)
        with pytest.raises(ValueError):
            make_quadratic(4, 0.5, 0.0, seed=0)
        with pytest.raises(ValueError):
            make_quadratic(4, 2.0, 1.5, seed=0)

    def test_requires_psd(self):
        with pytest.raises(ValueError, match="semidefinite"):
            QuadraticProblem.from_matrix(SymMatrix.diagonal([1.0, -1.0]))


class TestQuadEval:
    def test_origin(self):
        p = make_quadratic(3, 2.0, 0.3, seed=0)
        f, g = quad_eval(p, np.zeros(3))
        assert f == 0.0
        assert np.array_equal(g, np.zeros(3))

    def test_diagonal_example(self):
        p = QuadraticProblem.from_matrix(SymMatrix.diagonal([1.0, 2.0]))
        f, g = quad_eval(p, [1.0, 1.0])
        assert f == 1.5
        assert np.array_equal(g, [1.0, 2.0])

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(5)
        p = make_quadratic(5, 12.0, 0.6, seed=9)
        for _ in range(50):
            x = rng.standard_normal(5) * 2.0
            f, g = quad_eval(p, x)
            assert_grad_matches_fd(lambda y: quad_eval(p, y)[0], g, x)

    def test_euclidean_pl_inequality(self):
        # f(x) - f* <= ||grad||^2 / (2 lambda_min) on random points
        rng = np.random.default_rng(6)
        p = make_quadratic(6, 9.0, 0.4, seed=4)
        lam_min = eigh(p.matrix).values[0]
        for _ in range(100):
            x = rng.standard_normal(6) * 3.0
            f, g = quad_eval(p, x)
            assert f <= (g @ g) / (2.0 * lam_min) + 1e-9


class TestNoisyGrad:
    def test_sigma_zero_is_exact(self):
        p = make_quadratic(4, 3.0, 0.2, seed=8)
        x = np.array([1.0, -2.0, 0.5, 0.0])
        g = noisy_grad(p, x, 0.0, np.random.default_rng(0))
        assert np.array_equal(g, p.matrix.to_array() @ x)

    def test_reproducible_stream(self):
        p = make_quadratic(4, 3.0, 0.2, seed=8)
        x = np.ones(4)
        a = [noisy_grad(p, x, 1.0, s) for s in [np.random.default_rng(7)] for _ in range(3)]
        s2 = np.random.default_rng(7)
        b = [noisy_grad(p, x, 1.0, s2) for _ in range(3)]
        for ga, gb in zip(a, b):
            assert np.array_equal(ga, gb)

    def test_unbiased_at_clt_scale(self):
        # per-coordinate mean over 1e5 draws within 4 sigma / sqrt(1e5)
        p = QuadraticProblem.from_matrix(SymMatrix.diagonal([1.0, 2.0, 3.0]))
        stream = np.random.default_rng(123)
        n = 100_000
        acc = np.zeros(3)
        for _ in range(n):
            acc += noisy_grad(p, np.zeros(3), 1.0, stream)
        assert np.abs(acc / n).max() <= 0.013

    def test_rejects_negative_sigma(self):
        p = make_quadratic(3, 2.0, 0.1, seed=1)
        with pytest.raises(ValueError):
            noisy_grad(p, np.zeros(3), -0.1, np.random.default_rng(0))


class TestCosh:
    def test_origin(self):
        p = CoshProblem(4)
        f, g = cosh_eval(p, np.zeros(4))
        assert f == 0.0
        assert np.array_equal(g, np.zeros(4))

    def test_standard_values(self):
        p = CoshProblem(2)
        f, g = cosh_eval(p, [1.0, 0.0])
        assert f == pytest.approx(math.cosh(1.0) - 1.0, rel=1e-12)
        assert g == pytest.approx([math.sinh(1.0), 0.0])

    def test_gradient_matches_finite_differences(self):
        rng = np.random.default_rng(9)
        p = CoshProblem(5)
        for _ in range(50):
            x = rng.uniform(-3.0, 3.0, 5)
            f, g = cosh_eval(p, x)
            assert_grad_matches_fd(lambda y: cosh_eval(p, y)[0], g, x)

    def test_relaxed_curvature_inequality(self):
        # Hessian norm sum cosh(x_i) <= d + ||grad||_1, i.e. constants (d, 1)
        rng = np.random.default_rng(10)
        p = CoshProblem(4)
        for _ in range(200):
            x = rng.uniform(-5.0, 5.0, 4)
            _, g = cosh_eval(p, x)
            hess_norm = np.cosh(x).sum()
            assert hess_norm <= p.dim + np.abs(g).sum() + 1e-9

    def test_overflow_guard(self):
        p = CoshProblem(2)
        with pytest.raises(ValueError, match="guard"):
            cosh_eval(p, [800.0, 0.0])

    def test_value_well_conditioned_near_zero(self):
        p = CoshProblem(1)
        f, _ = cosh_eval(p, [1e-8])
        assert f == pytest.approx(0.5e-16, rel=1e-9)
