"""Greville collocation: assembly, banded solves, condition estimates."""

import numpy as np
import numpy.testing as npt
import pytest

from splineprod import (
    BandedMatrix,
    Spline,
    bernstein_knots,
    collocation_matrix,
    collocation_product,
    condition_estimate_1norm,
    evaluate,
    greville_abscissae,
    solve_banded,
    uniform_open_knots,
)
from helpers import basis_value, dense_cond1, random_open_kv, random_spline_on


def banded_from_dense(dense, kl, ku):
    """Pack a dense matrix into factorization band storage."""
    m = dense.shape[0]
    bands = np.zeros((2 * kl + ku + 1, m))
    for i in range(m):
        for j in range(max(0, i - kl), min(m, i + ku + 1)):
            bands[kl + ku + i - j, j] = dense[i, j]
    return BandedMatrix(m, kl, ku, bands)


def diagonal_matrix(values):
    return banded_from_dense(np.diag(values), 0, 0)


# ---------- collocation_matrix ----------


def test_linear_collocation_is_identity():
    kv = bernstein_knots(1)
    matrix = collocation_matrix(kv, greville_abscissae(kv))
    npt.assert_array_equal(matrix.to_dense(), np.eye(2))


def test_collocation_rows_sum_to_one():
    rng = np.random.default_rng(13)
    for _ in range(10):
        p = int(rng.integers(1, 5))
        kv = random_open_kv(rng, p)
        matrix = collocation_matrix(kv, greville_abscissae(kv))
        npt.assert_allclose(matrix.row_sums(), 1.0, atol=1e-14, rtol=0.0)


def test_collocation_entries_and_diagonal():
    kv = uniform_open_knots(3, 5)
    xs = greville_abscissae(kv)
    matrix = collocation_matrix(kv, xs)
    dense = matrix.to_dense()
    assert np.all(np.diag(dense) > 0.0)
    for i, x in enumerate(xs):
        for j in range(kv.dimension):
            expected = basis_value(kv.knots, 3, j, x)
            assert dense[i, j] == pytest.approx(expected, abs=1e-14)
    assert matrix.lower_bandwidth <= 3 and matrix.upper_bandwidth <= 3
    # each row holds at most p + 1 nonzero basis values
    assert np.max(np.sum(dense != 0.0, axis=1)) <= 4


def test_collocation_rejects_nesting_violations():
    kv = uniform_open_knots(3, 5)
    clustered = np.linspace(0.01, 0.05, kv.dimension)
    with pytest.raises(ValueError, match="nesting"):
        collocation_matrix(kv, clustered)
    with pytest.raises(ValueError, match="strictly increasing"):
        collocation_matrix(kv, np.zeros(kv.dimension))
    with pytest.raises(ValueError, match="abscissa count"):
        collocation_matrix(kv, np.linspace(0.0, 1.0, 3))


# ---------- solve_banded ----------


def test_solve_identity_and_diagonal():
    rhs = np.array([3.0, -1.0, 2.0, 0.5])
    identity = diagonal_matrix(np.ones(4))
    npt.assert_allclose(solve_banded(identity, rhs), rhs, atol=1e-15)
    scaled = diagonal_matrix(np.arange(1.0, 5.0))
    npt.assert_allclose(
        solve_banded(scaled, rhs), rhs / np.arange(1.0, 5.0), atol=1e-15
    )


def test_solve_matches_dense_oracle():
    rng = np.random.default_rng(300)
    m, p = 50, 3
    dense = np.zeros((m, m))
    for i in range(m):
        for j in range(max(0, i - p), min(m, i + p + 1)):
            dense[i, j] = rng.uniform(-1.0, 1.0)
        dense[i, i] += 2.0 * p  # keep the system well conditioned
    matrix = banded_from_dense(dense, p, p)
    rhs = rng.uniform(-1.0, 1.0, size=m)
    x = solve_banded(matrix, rhs)
    expected = np.linalg.solve(dense, rhs)
    assert np.max(np.abs(x - expected)) / np.max(np.abs(expected)) <= 1e-12
    npt.assert_allclose(matrix.matvec(x), rhs, atol=1e-12)


def test_solve_singular_matrix_raises():
    singular = diagonal_matrix(np.array([1.0, 0.0, 2.0]))
    with pytest.raises(np.linalg.LinAlgError, match="singular"):
        solve_banded(singular, np.ones(3))
    with pytest.raises(ValueError, match="length"):
        solve_banded(diagonal_matrix(np.ones(3)), np.ones(4))


def test_solve_residual_is_small():
    rng = np.random.default_rng(42)
    kv = uniform_open_knots(4, 7)
    matrix = collocation_matrix(kv, greville_abscissae(kv))
    rhs = rng.uniform(-1.0, 1.0, size=kv.dimension)
    x = solve_banded(matrix, rhs)
    residual = np.max(np.abs(matrix.matvec(x) - rhs)) / np.max(np.abs(rhs))
    assert residual <= 1e-13


# ---------- condition_estimate_1norm ----------


def test_condition_of_identity_and_diagonal():
    assert condition_estimate_1norm(diagonal_matrix(np.ones(5))) == pytest.approx(1.0)
    scaled = diagonal_matrix(np.arange(1.0, 11.0))
    assert condition_estimate_1norm(scaled) == pytest.approx(10.0)


def test_condition_estimate_close_to_exact_small_cases():
    rng = np.random.default_rng(911)
    for trial in range(20):
        p = int(rng.integers(1, 5))
        kv = random_open_kv(rng, p, max_interior=6)
        if kv.dimension > 30:
            continue
        matrix = collocation_matrix(kv, greville_abscissae(kv))
        estimate = condition_estimate_1norm(matrix)
        exact = dense_cond1(matrix)
        assert estimate <= exact * (1.0 + 1e-10)  # estimator is a lower bound
        assert estimate >= exact / 3.0


def test_condition_of_singular_matrix_is_infinite():
    singular = diagonal_matrix(np.array([1.0, 0.0, 2.0]))
    assert condition_estimate_1norm(singular) == np.inf


# ---------- collocation_product ----------


def test_collocation_product_cubic_pair():
    rng = np.random.default_rng(60)
    kv = uniform_open_knots(3, 5)
    f, g = random_spline_on(rng, kv), random_spline_on(rng, kv)
    product = collocation_product(f, g)
    grid = np.linspace(0.0, 1.0, 201)
    reference = evaluate(f, grid) * evaluate(g, grid)
    err = np.max(np.abs(evaluate(product, grid) - reference))
    assert err / np.max(np.abs(reference)) <= 1e-13


def test_collocation_product_with_unit_factor():
    rng = np.random.default_rng(61)
    f = random_spline_on(rng, uniform_open_knots(2, 4))
    g_kv = uniform_open_knots(2, 4)
    g = Spline(g_kv, np.ones(g_kv.dimension))
    product = collocation_product(f, g)
    grid = np.linspace(0.0, 1.0, 201)
    npt.assert_allclose(evaluate(product, grid), evaluate(f, grid), atol=1e-12)


def test_banded_matrix_validation():
    with pytest.raises(ValueError, match="band storage"):
        BandedMatrix(3, 1, 1, np.zeros((3, 3)))
    with pytest.raises(ValueError, match="nonnegative"):
        BandedMatrix(3, -1, 0, np.zeros((0, 3)))
