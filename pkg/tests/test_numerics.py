"""Contract tests for the dense linear-algebra primitives."""

import numpy as np
import pytest

from beamswarm.numerics import (
    NumericalFailure,
    SingularMatrixError,
    hpd_solve,
    logdet_hpd,
    svd,
)
from util import crandn, random_hpd

SHAPES = [(2, 2), (4, 6), (6, 4), (6, 6), (1, 3), (4, 4), (2, 6)]


def test_svd_identity():
    factors = svd(np.eye(3))
    assert np.allclose(factors.sigma, [1.0, 1.0, 1.0])


def test_svd_diagonal_sorted():
    factors = svd(np.diag([1.0, 2.0, 3.0]))
    assert np.allclose(factors.sigma, [3.0, 2.0, 1.0])


@pytest.mark.parametrize("shape", SHAPES)
def test_svd_contracts(shape):
    rng = np.random.default_rng(hash(shape) % 2**32)
    a = crandn(rng, *shape)
    factors = svd(a)
    m, n = shape
    assert factors.u.shape == (m, m)
    assert factors.v.shape == (n, n)
    assert factors.sigma.shape == (min(m, n),)
    assert np.all(np.diff(factors.sigma) <= 0)
    assert np.all(factors.sigma >= 0)
    assert np.linalg.norm(factors.u.conj().T @ factors.u - np.eye(m)) <= 1e-10
    assert np.linalg.norm(factors.v.conj().T @ factors.v - np.eye(n)) <= 1e-10
    assert np.linalg.norm(factors.compose() - a) <= 1e-10


def test_svd_randomized_contracts():
    rng = np.random.default_rng(11)
    for trial in range(200):
        shape = SHAPES[trial % len(SHAPES)]
        a = crandn(rng, *shape)
        factors = svd(a)
        assert np.linalg.norm(factors.compose() - a) <= 1e-10
        assert np.all(np.diff(factors.sigma) <= 0)
        assert (
            np.linalg.norm(
                factors.v.conj().T @ factors.v - np.eye(shape[1])
            )
            <= 1e-10
        )


def test_svd_rejects_bad_input():
    with pytest.raises(ValueError):
        svd(np.zeros((2, 2, 2)))
    with pytest.raises(ValueError):
        svd(np.array([[1.0, np.nan], [0.0, 1.0]]))


def test_hpd_solve_scaled_identity():
    x = hpd_solve(2.0 * np.eye(3), np.eye(3))
    assert np.allclose(x, 0.5 * np.eye(3))


def test_hpd_solve_residual():
    rng = np.random.default_rng(5)
    for _ in range(50):
        n = int(rng.integers(1, 7))
        a = random_hpd(rng, n)
        b = crandn(rng, n, int(rng.integers(1, 4)))
        x = hpd_solve(a, b)
        assert np.linalg.norm(a @ x - b) <= 1e-9 * max(1.0, np.linalg.norm(b))


def test_hpd_solve_vector_rhs():
    rng = np.random.default_rng(6)
    a = random_hpd(rng, 4)
    b = crandn(rng, 4)
    x = hpd_solve(a, b)
    assert x.shape == (4,)
    assert np.linalg.norm(a @ x - b) <= 1e-9


def test_hpd_solve_rejects_indefinite():
    with pytest.raises(SingularMatrixError):
        hpd_solve(np.diag([1.0, -1.0]), np.zeros(2))
    with pytest.raises(SingularMatrixError):
        hpd_solve(np.zeros((2, 2)), np.zeros(2))


def test_hpd_solve_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hpd_solve(np.array([[1.0, 2.0], [0.0, 1.0]]), np.zeros(2))


def test_solve_then_multiply_roundtrip():
    rng = np.random.default_rng(7)
    for _ in range(50):
        a = random_hpd(rng, 5)
        b = crandn(rng, 5, 2)
        assert np.linalg.norm(a @ hpd_solve(a, b) - b) <= 1e-9


def test_logdet_identity_zero():
    assert logdet_hpd(np.eye(4)) == 0.0


def test_logdet_diagonal():
    assert abs(logdet_hpd(np.diag([2.0, 4.0])) - np.log(8.0)) <= 1e-12


def test_logdet_matches_eigenvalues():
    rng = np.random.default_rng(8)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        a = random_hpd(rng, n)
        expected = float(np.sum(np.log(np.linalg.eigvalsh(a))))
        assert abs(logdet_hpd(a) - expected) <= 1e-10 * max(1.0, abs(expected))


def test_logdet_scaling_identity():
    rng = np.random.default_rng(9)
    for _ in range(50):
        n = int(rng.integers(1, 7))
        a = random_hpd(rng, n)
        c = float(rng.uniform(0.1, 10.0))
        lhs = logdet_hpd(c * a)
        rhs = logdet_hpd(a) + n * np.log(c)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


def test_logdet_rejects_singular():
    with pytest.raises(SingularMatrixError):
        logdet_hpd(np.diag([1.0, 0.0]))


def test_errors_are_numerical_failures():
    assert issubclass(SingularMatrixError, NumericalFailure)
