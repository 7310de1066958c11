import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from fracwave.frac_laplacian import (
    Grid1D,
    SpdOperator,
    build_gradient,
    build_laplacian,
    frac_power_apply,
    frac_power_matrix,
    spectral_frac_laplacian,
)

DIR3 = Grid1D(3, 1.0, "dirichlet")


def rel(a, b):
    return np.abs(a - b).max() / np.abs(b).max()


# -- grid -----------------------------------------------------------------------

@pytest.mark.parametrize("n, h, boundary", [(2, 1.0, "periodic"), (10, 0.0, "periodic"), (10, -1.0, "dirichlet"),
                                            (10, 1.0, "neumann")])
def test_grid_validation(n, h, boundary):
    with pytest.raises(ValueError):
        Grid1D(n, h, boundary)


def test_grid_length():
    assert Grid1D(10, 0.5, "dirichlet").length == 4.5
    assert Grid1D(10, 0.5).length == 5.0


# -- Laplacian ------------------------------------------------------------------

def test_dirichlet_three_points():
    op = build_laplacian(DIR3)
    np.testing.assert_array_equal(op.matrix, [[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
    np.testing.assert_allclose(op.eigenvalues, [2 - math.sqrt(2), 2, 2 + math.sqrt(2)], atol=1e-14)


def test_periodic_four_points():
    op = build_laplacian(Grid1D(4, 1.0))
    np.testing.assert_allclose(op.eigenvalues, [0, 2, 2, 4], atol=1e-14)


@pytest.mark.parametrize("grid", [Grid1D(17, 0.3), Grid1D(17, 0.3, "dirichlet"), Grid1D(64, 1e-2)])
def test_laplacian_invariants(grid):
    op = build_laplacian(grid)
    assert np.abs(op.matrix - op.matrix.T).max() == 0
    assert op.eigenvalues.min() >= -1e-10 * op.eigenvalues.max()
    q = op.eigenvectors
    assert np.abs(q.T @ q - np.eye(grid.n)).max() <= 1e-10
    if not grid.periodic:
        assert op.eigenvalues.min() > 0


def test_spd_rejects_asymmetric_and_indefinite():
    with pytest.raises(ValueError):
        SpdOperator.from_matrix([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        SpdOperator.from_matrix([[1.0, 0.0], [0.0, -1.0]])
    with pytest.raises(ValueError):
        SpdOperator.from_matrix(np.ones(3))


# -- fractional powers ------------------------------------------------------------

def test_power_examples():
    op = build_laplacian(Grid1D(20, 0.1, "dirichlet"))
    u = np.sin(np.arange(20.0)) + 0.3
    au = op.matrix @ u
    assert rel(frac_power_apply(op, 1, u), au) <= 1e-10
    np.testing.assert_array_equal(frac_power_apply(op, 0, u), u)
    half = frac_power_apply(op, 0.5, frac_power_apply(op, 0.5, u))
    assert rel(half, au) <= 1e-10


def test_power_matrix_examples():
    op = build_laplacian(DIR3)
    np.testing.assert_allclose(frac_power_matrix(op, 1), op.matrix, atol=1e-13)
    m = frac_power_matrix(op, 0.5)
    assert np.abs(m @ m - op.matrix).max() <= 1e-10
    eye = SpdOperator.from_matrix(np.eye(4))
    for r in (0.0, 0.3, 1.0):
        np.testing.assert_allclose(frac_power_matrix(eye, r), np.eye(4), atol=1e-14)


def test_power_errors():
    op = build_laplacian(DIR3)
    with pytest.raises(ValueError):
        frac_power_apply(op, -0.1, np.ones(3))
    with pytest.raises(ValueError):
        frac_power_apply(op, 0.5, np.ones(4))
    with pytest.raises(ValueError):
        frac_power_matrix(op, -1)


def test_zero_mode_is_clipped():
    op = build_laplacian(Grid1D(8, 1.0))
    np.testing.assert_allclose(frac_power_apply(op, 0.3, np.ones(8)), 0, atol=1e-13)


@pytest.mark.parametrize("r1", [0.25, 0.3, 0.5])
@pytest.mark.parametrize("r2", [0.25, 0.3, 0.5])
@pytest.mark.parametrize("grid", [Grid1D(24, 0.1, "dirichlet"), Grid1D(24, 0.1)])
def test_semigroup(r1, r2, grid):
    op = build_laplacian(grid)
    u = np.cos(0.7 * np.arange(grid.n)) + np.linspace(0, 1, grid.n)
    lhs = frac_power_apply(op, r1, frac_power_apply(op, r2, u))
    assert rel(lhs, frac_power_apply(op, r1 + r2, u)) <= 1e-9


@pytest.mark.parametrize("r", [0.0, 0.1, 0.25, 0.5, 0.75, 1.0])
@pytest.mark.parametrize("grid", [Grid1D(30, 0.2, "dirichlet"), Grid1D(30, 0.2)])
def test_power_matrix_is_symmetric_psd(r, grid):
    m = frac_power_matrix(build_laplacian(grid), r)
    assert np.abs(m - m.T).max() == 0
    lam = np.linalg.eigvalsh(m)
    assert lam.min() >= -1e-10 * lam.max()


@settings(max_examples=50, deadline=None)
@given(arrays(float, 12, elements=st.floats(-10, 10)), st.floats(0.0, 1.0),
       st.sampled_from(["dirichlet", "periodic"]))
def test_quadratic_form_nonnegative(u, r, boundary):
    op = build_laplacian(Grid1D(12, 0.5, boundary))
    scale = op.eigenvalues.max() ** r * max(u @ u, 1.0)
    assert u @ frac_power_apply(op, r, u) >= -1e-12 * scale


# -- spectral path ----------------------------------------------------------------------

@pytest.mark.parametrize("y", [0.5, 1.0, 1.5, 2.0])
@pytest.mark.parametrize("n", [16, 64])
def test_spectral_matches_matrix_path(y, n):
    grid = Grid1D(n, 0.37)
    u = np.exp(-((grid.x - 2.0) ** 2)) + 0.1 * np.sin(3 * grid.x)
    dense = frac_power_apply(build_laplacian(grid), y / 2, u)
    assert rel(spectral_frac_laplacian(u, y, grid), dense) <= 1e-9


def test_spectral_examples():
    grid = Grid1D(32, 0.25)
    u = np.random.default_rng(0).standard_normal(32)
    out = spectral_frac_laplacian(u, 2, grid)
    assert np.isrealobj(out)
    assert rel(out, build_laplacian(grid).matrix @ u) <= 1e-10
    np.testing.assert_allclose(spectral_frac_laplacian(u, 0, grid), u - u.mean(), atol=1e-13)
    m = 3
    mode = np.cos(2 * np.pi * m * grid.x / grid.length)
    kappa = 2 * math.sin(math.pi * m / grid.n) / grid.h
    np.testing.assert_allclose(spectral_frac_laplacian(mode, 1.3, grid), kappa**1.3 * mode, atol=1e-12)


def test_spectral_errors():
    with pytest.raises(ValueError):
        spectral_frac_laplacian(np.ones(5), 1.0, Grid1D(5, 1.0, "dirichlet"))
    with pytest.raises(ValueError):
        spectral_frac_laplacian(np.ones(4), 1.0, Grid1D(5, 1.0))


# -- gradient ----------------------------------------------------------------------------

def test_gradient_skew_and_distinct_from_root():
    grid = Grid1D(16, 1.0)
    b = build_gradient(grid)
    assert b.skew_residual() == 0
    half = frac_power_matrix(build_laplacian(grid), 0.5)
    assert np.abs(b.matrix - half).max() > 0.1
    np.testing.assert_array_equal(b.matrix @ np.ones(16), 0)


def test_gradient_dirichlet_rows_one_sided():
    b = build_gradient(Grid1D(5, 0.5, "dirichlet")).matrix
    x = np.arange(5) * 0.5
    np.testing.assert_allclose(b @ (3 * x + 1), 3.0, atol=1e-13)
