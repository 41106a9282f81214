import math
import warnings

import numpy as np
import pytest

from landau_clusters import BoundaryMassWarning, ConvergenceError, GaussianSpec, make_gaussian
from landau_clusters.inverse import (LogGrid, Deconvolution, RingProfile, forward_convolve, gaussian_ring_profile_exact,
                                     isospectral_compare, kernel, mellin_deconvolve, relative_l2_middle,
                                     require_converged, ring_profile, sobolev_norm, sobolev_norm_sq)
from landau_clusters.potentials import rotate, scale, translate
from landau_clusters.radon import spectral_invariant_I

GRID = LogGrid(0.05, 1e6, 341)


def test_log_grid():
    g = LogGrid.parse("log:0.1:10:3")
    assert np.allclose(g.nodes, [0.1, 1.0, 10.0])
    assert g.weights.sum() == pytest.approx(math.log(100.0))
    with pytest.raises(ValueError):
        LogGrid.parse("lin:0:1:3")
    with pytest.raises(ValueError):
        LogGrid(1.0, 0.5, 10)
    with pytest.raises(ValueError):
        RingProfile(g, np.zeros(4))


def test_kernel():
    assert kernel(0.0) == 1.0
    assert abs(kernel(2.404825557695773)) < 1e-20


def test_ring_profile_matches_closed_form():
    V = make_gaussian(GaussianSpec(inverse_width=1.7, amplitude=0.8))
    truth = gaussian_ring_profile_exact(GRID, 0.8, 1.7)
    assert np.allclose(ring_profile(V, GRID).values, truth.values, rtol=1e-12, atol=1e-300)


def test_forward_convolution_reproduces_invariant(unit_gaussian):
    r = np.array([0.3, 0.5, 1.0, 2.0, 5.0])
    with warnings.catch_warnings():
        warnings.simplefilter("error", BoundaryMassWarning)
        I = forward_convolve(ring_profile(unit_gaussian, GRID), r)
    assert np.allclose(I, spectral_invariant_I(unit_gaussian, r), rtol=1e-10)


def test_short_grid_warns(unit_gaussian):
    short = LogGrid(0.5, 5.0, 60)
    with pytest.warns(BoundaryMassWarning):
        forward_convolve(ring_profile(unit_gaussian, short), [1.0])


def test_round_trip_without_inverse_crime():
    V = make_gaussian(GaussianSpec(inverse_width=0.6))
    r = np.geomspace(0.1, 10.0, 64)
    rec = mellin_deconvolve(spectral_invariant_I(V, r), r, GRID, noise=1e-8)
    assert rec.residual_ok
    unclipped = mellin_deconvolve(spectral_invariant_I(V, r), r, GRID, noise=1e-8, clip=False)
    assert unclipped.residual <= 1.1e-8
    assert relative_l2_middle(rec.profile, ring_profile(V, GRID)) < 0.03


def test_noisy_round_trip(unit_gaussian):
    rng = np.random.default_rng(7)
    r = np.geomspace(0.1, 10.0, 64)
    I = spectral_invariant_I(unit_gaussian, r) * (1 + 1e-6 * rng.standard_normal(r.size))
    rec = mellin_deconvolve(I, r, GRID, noise=2e-6)
    assert relative_l2_middle(rec.profile, ring_profile(unit_gaussian, GRID)) < 0.03


def test_fixed_lambda_and_failure_flag(unit_gaussian):
    r = np.geomspace(0.1, 10.0, 32)
    I = spectral_invariant_I(unit_gaussian, r)
    rec = mellin_deconvolve(I, r, GRID, lam=1.0, noise=1e-12)
    assert not rec.residual_ok and rec.lam == 1.0
    with pytest.raises(ConvergenceError):
        require_converged(rec)
    assert rec.clipped_fraction >= 0.0


def test_sobolev_norms(unit_gaussian):
    assert sobolev_norm_sq(unit_gaussian, 0.0) == pytest.approx(2 * math.pi ** 3, rel=1e-10)
    # (1 + k^2)^{1/2 * 2} with the half convention equals (1 + k^2)^{1} in the standard one
    assert sobolev_norm_sq(unit_gaussian, 2.0) == pytest.approx(sobolev_norm_sq(unit_gaussian, 1.0, "standard"))
    # |Vhat|^2 = pi^2 exp(-k^2/2): int |Vhat|^2 = 2 pi^3 and int |k|^2 |Vhat|^2 = 4 pi^3
    assert sobolev_norm_sq(unit_gaussian, 1.0, "standard") == pytest.approx(6 * math.pi ** 3, rel=1e-10)
    assert sobolev_norm(unit_gaussian, 0.0) == pytest.approx(math.sqrt(2 * math.pi ** 3))
    with pytest.raises(ValueError):
        sobolev_norm_sq(unit_gaussian, 0.0, "other")


def test_isospectral_comparison(off_center_mixture):
    r = [0.5, 1.0, 2.0]
    twin = translate(rotate(off_center_mixture, -1.1), (0.7, 2.0))
    rep = isospectral_compare(off_center_mixture, twin, r)
    assert rep.isospectral and rep.max_relative_gap < 1e-10
    assert np.max(rep.norm_gaps) < 1e-10
    other = isospectral_compare(off_center_mixture, scale(off_center_mixture, 1.1), r)
    assert not other.isospectral and other.norm_gaps is None
    assert other.max_relative_gap == pytest.approx(0.21, rel=1e-6)
