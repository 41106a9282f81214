import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from landau_clusters.errors import ConvergenceError
from landau_clusters.weyl import (SymbolGrid, hermiticity_gap, laguerre_transform, loglog_slope, matrix_to_csv,
                                  radial_eigenvalue, radial_eigenvalue_limit_check, radial_eigenvalues,
                                  real_part_checked, validate_wigner_closed_form, weyl_matrix,
                                  weyl_matrix_element, wigner_cross, wigner_cross_quadrature, wigner_table)

H = 0.2


def test_closed_form_matches_quadrature():
    assert validate_wigner_closed_form(hbar=0.3, points=25, max_index=14) < 1e-8


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 10), st.integers(0, 10), st.floats(-1.5, 1.5), st.floats(-1.5, 1.5))
def test_wigner_symmetry(m, k, x, p):
    # G(e_m, e_k) = conj(G(e_k, e_m)) for real e_m, e_k
    assert wigner_cross(m, k, x, p, H) == pytest.approx(np.conj(wigner_cross(k, m, x, p, H)), abs=1e-12)


def test_wigner_table_consistent():
    x = np.array([0.1, -0.4])
    p = np.array([0.3, 0.2])
    T = wigner_table(6, x, p, H)
    for m, k in [(0, 0), (2, 5), (6, 1)]:
        assert np.allclose(T[m, k], wigner_cross(m, k, x, p, H), atol=1e-13)
    assert wigner_cross(3, 1, 0.2, 0.1, H) == pytest.approx(wigner_cross_quadrature(3, 1, 0.2, 0.1, H), abs=1e-10)


def test_identity_and_oscillator():
    grid = SymbolGrid.for_basis(H, 20)
    X = weyl_matrix(grid, grid.sample(lambda x, p: np.ones_like(x)), 20)
    assert np.allclose(X, np.eye(20), atol=1e-12)
    X = weyl_matrix(grid, grid.sample(lambda x, p: x * x + p * p), 20)
    assert np.allclose(X, np.diag(H * (2 * np.arange(20) + 1)), atol=1e-12)


def test_momentum_is_derivative():
    """Op(p) = -i hbar d/dx: <p e_l, e_k> = -i sqrt(hbar/2) (sqrt(l) d_{k,l-1} - sqrt(l+1) d_{k,l+1})."""
    N = 12
    grid = SymbolGrid.for_basis(H, N)
    X = weyl_matrix(grid, grid.sample(lambda x, p: p), N)
    ref = np.zeros((N, N), dtype=complex)
    for l in range(N):
        if l > 0:
            ref[l - 1, l] = -1j * math.sqrt(H / 2) * math.sqrt(l)
        if l + 1 < N:
            ref[l + 1, l] = 1j * math.sqrt(H / 2) * math.sqrt(l + 1)
    assert np.allclose(X, ref, atol=1e-12)
    with pytest.raises(ConvergenceError):
        real_part_checked(X)


def test_single_element_and_hermiticity():
    grid = SymbolGrid.for_basis(H, 10)
    vals = grid.sample(lambda x, p: np.exp(-(x - 0.3) ** 2 - 2 * p ** 2) * (1 + p))
    X = weyl_matrix(grid, vals, 10)
    assert hermiticity_gap(X) < 1e-14
    assert weyl_matrix_element(grid, vals, 4, 7) == pytest.approx(X[7, 4], abs=1e-13)
    with pytest.raises(ValueError):
        weyl_matrix(grid, vals + 0j, 10)
    assert matrix_to_csv(X[:2, :2], H).startswith("# hbar=0.2")


def test_grid_matrix_of_radial_symbol_is_diagonal_with_laguerre_eigenvalues():
    rho = lambda r: np.exp(-r * r) * (1 + r * r)
    N = 16
    grid = SymbolGrid.for_basis(H, N)
    X = real_part_checked(weyl_matrix(grid, grid.sample(lambda x, p: rho(np.hypot(x, p))), N))
    assert np.allclose(X, np.diag(np.diag(X)), atol=1e-12)
    assert np.allclose(np.diag(X), radial_eigenvalues(rho, N - 1, H), atol=1e-11)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 60), st.floats(0.05, 3.0))
def test_radial_closed_forms(n, h):
    assert radial_eigenvalue(lambda r: np.ones_like(r), n, h) == pytest.approx(1.0, abs=1e-10)
    assert radial_eigenvalue(lambda r: r * r, n, h) == pytest.approx(h * (2 * n + 1), rel=1e-9)
    exact = (1 - h) ** n / (1 + h) ** (n + 1)
    assert radial_eigenvalue(lambda r: np.exp(-r * r), n, h) == pytest.approx(exact, rel=1e-8, abs=1e-14)


def test_transform_refinement_detects_rough_profiles():
    with pytest.raises(ConvergenceError):
        laguerre_transform(lambda t: np.sign(np.sin(40 * np.sqrt(t))), 5, order=20)
    with pytest.raises(ValueError):
        radial_eigenvalue(lambda r: r, -1, H)


def test_limit_check_first_order_rate():
    chk = radial_eigenvalue_limit_check(lambda r: np.exp(-r * r) * np.cos(r), 3.0, [16, 32, 64, 128])
    assert chk.slope >= 0.9
    assert loglog_slope([1, 2, 4], [1, 4, 16]) == pytest.approx(2.0)
