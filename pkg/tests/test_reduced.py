import math

import numpy as np
import pytest

from landau_clusters import GaussianSpec, ResourceCapError, SemiclassicalPoint, make_constant, make_gaussian
from landau_clusters.potentials import rotate, translate
from landau_clusters.radon import circle_average
from landau_clusters.reduced import (ReducedSymbol, basis_size_for, bump, monomial, poly_bump, reduced_matrix,
                                     reduced_moments, reduced_spectrum, reduced_symbol, symbol_residual_rate,
                                     szego_check, tail_truncation_check, taylor_remainder, xi_integral)

PT = SemiclassicalPoint(3.0, 8)


def test_constant_potential_symbol_is_constant():
    V = make_constant(0.7)
    xi = (np.array([0.0, 1.0, -2.0]), np.array([0.5, 0.0, 1.0]))
    assert np.allclose(reduced_symbol(V, xi, PT), 0.7, atol=1e-12)


def test_symbol_approaches_average_at_second_order(off_center_mixture):
    fit = symbol_residual_rate(off_center_mixture, (0.4, -0.2), 3.0, [16, 32, 64])
    assert 1.8 < fit.slope < 2.2


def test_cached_symbol(unit_gaussian):
    S = ReducedSymbol(unit_gaussian, PT)
    a = S(np.array([0.1, 0.2]), np.array([0.0, 0.3]))
    assert S(np.array([0.1, 0.2]), np.array([0.0, 0.3])) is a


def test_tail_is_negligible(unit_gaussian):
    assert tail_truncation_check(unit_gaussian, (0.0, 0.0), SemiclassicalPoint(3.0, 64), 12.0) < 1e-20
    with pytest.raises(ValueError):
        tail_truncation_check(unit_gaussian, (0.0, 0.0), PT, 2.0)


def test_radial_and_grid_routes_agree(unit_gaussian):
    M = 24
    diag = reduced_matrix(unit_gaussian, PT, M, method="radial")
    grid = reduced_matrix(unit_gaussian, PT, M, method="grid")
    assert np.allclose(grid, diag, atol=1e-10)


def test_rotation_about_origin_keeps_the_spectrum(off_center_mixture):
    M = 40
    a = reduced_spectrum(off_center_mixture, PT, M).eigenvalues
    b = reduced_spectrum(rotate(off_center_mixture, 0.9), PT, M).eigenvalues
    top = slice(-10, None)
    assert np.allclose(a[top], b[top], atol=1e-8)


def test_constant_potential_matrix_is_scalar():
    X = reduced_matrix(make_constant(-1.5), PT, 10, method="grid")
    assert np.allclose(X, -1.5 * np.eye(10), atol=1e-12)


def test_memory_cap():
    with pytest.raises(ResourceCapError):
        reduced_matrix(translate(make_gaussian(GaussianSpec()), (1, 0)), PT, 200, memory_cap=1024)
    with pytest.raises(ValueError):
        reduced_matrix(make_gaussian(GaussianSpec()), PT, 5, method="magic")


def test_first_moment_is_exact_up_to_truncation(unit_gaussian):
    """tr T_n = (1/2 pi hbar) int Phi, and int Phi = int V~ exactly."""
    m = reduced_moments(unit_gaussian, PT, None, 1)
    assert m.trace == pytest.approx(m.integral, rel=1e-8)
    # the averaged potential of the unit Gaussian integrates to 2 pi * (pi) / ... check against quadrature
    assert xi_integral(unit_gaussian, 3.0) == pytest.approx(2 * math.pi, rel=1e-9)


def test_reduced_eigenvalues_inside_the_range(off_center_mixture):
    eig = reduced_spectrum(off_center_mixture, PT, 48).eigenvalues
    s = np.linspace(-6, 6, 241)
    A, B = np.meshgrid(s, s)
    vt = circle_average(off_center_mixture, (A, B), 3.0)
    assert eig.max() <= vt.max() + 1e-9 and eig.min() >= vt.min() - 1e-9


def test_szego_rows(unit_gaussian):
    rows = szego_check(unit_gaussian, 3.0, poly_bump(2, 1.5), [8, 16])
    assert abs(rows[1].gap) < abs(rows[0].gap)
    assert rows[0].basis_size == basis_size_for(unit_gaussian, SemiclassicalPoint(3.0, 8))


def test_test_functions():
    assert bump(0.0) == pytest.approx(1.0)
    assert bump(np.array([1.0, -1.2]))[0] == 0.0
    assert poly_bump(2, 2.0)(1.0) == pytest.approx(math.exp(1 - 4 / 3))
    assert monomial(3)(2.0) == 8.0
    with pytest.raises(ValueError):
        poly_bump(0, 1.0)


def test_taylor_remainder_identity():
    f, d1, d2 = np.exp, np.exp, np.exp
    E = 0.4
    t = np.linspace(-1, 2, 7)
    R = taylor_remainder(d2, E, t)
    assert np.allclose(f(E) + (t - E) * d1(E) + (t - E) ** 2 * R, f(t), atol=1e-13)
