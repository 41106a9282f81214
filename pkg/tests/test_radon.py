import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from landau_clusters.errors import ConvergenceError
from landau_clusters.potentials import from_function
from landau_clusters.radon import (PhasePoint, check_map, circle_average, circle_average_parametrized,
                                   energy_to_radius, radius_to_energy, radon_transform, radon_via_fourier,
                                   spectral_invariant_I, spectral_invariant_I_space)


@settings(max_examples=50, deadline=None)
@given(st.floats(min_value=1e-6, max_value=1e6))
def test_energy_radius_round_trip(E):
    assert radius_to_energy(energy_to_radius(E)) == pytest.approx(E, rel=1e-14)


def test_check_map_swaps_and_scales():
    y0, y1 = check_map(1.0, 2.0)
    assert (float(y0), float(y1)) == pytest.approx((2 / math.sqrt(2), 1 / math.sqrt(2)))
    assert PhasePoint(1.0, 2.0).check() == pytest.approx((2 / math.sqrt(2), 1 / math.sqrt(2)))


def test_centred_gaussian_average(unit_gaussian):
    # a circle of radius sqrt(E/2) about the origin sees exp(-E/2) everywhere
    assert circle_average(unit_gaussian, PhasePoint(0.0, 0.0), 3.0) == pytest.approx(math.exp(-1.5), rel=1e-14)
    with pytest.raises(ValueError):
        circle_average(unit_gaussian, (0.0, 0.0), 0.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.2, 6.0))
def test_orbit_parametrization_agrees(x2, p2, E):
    V = from_function(lambda x, y: np.exp(-(x - 0.5) ** 2 - 2 * (y + 0.3) ** 2))
    a = float(circle_average(V, (x2, p2), E))
    b = circle_average_parametrized(V, x2, p2, E)
    assert a == pytest.approx(b, abs=1e-11)


def test_trapezoid_path_against_oracle(off_center_mixture):
    bare = from_function(off_center_mixture.evaluator, inverse_width=1.0)
    y = (np.array([0.0, 0.7, -1.2]), np.array([0.3, -0.2, 2.0]))
    assert np.allclose(radon_transform(bare, y, 1.1), radon_transform(off_center_mixture, y, 1.1), atol=1e-12)


def test_trapezoid_refinement_can_fail():
    rough = from_function(lambda x, y: np.sign(x - 0.1234))
    with pytest.raises(ConvergenceError):
        radon_transform(rough, (np.array([0.0]), np.array([0.0])), 1.0, max_count=1024)


def test_frequency_route_matches_space_route(off_center_mixture):
    y = (np.array([0.1, -0.5]), np.array([0.4, 0.9]))
    assert np.allclose(radon_via_fourier(off_center_mixture, y, 0.8), radon_transform(off_center_mixture, y, 0.8),
                       atol=1e-10)


@pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
def test_invariant_two_routes(unit_gaussian, off_center_mixture, r):
    for V in (unit_gaussian, off_center_mixture):
        a = spectral_invariant_I(V, r)
        b = spectral_invariant_I_space(V, r)
        assert a == pytest.approx(b, rel=1e-6)


def test_invariant_small_radius_limit(unit_gaussian):
    # J0(0) = 1, so I(r) -> int |Vhat|^2 = 2 pi^3 as r -> 0
    assert spectral_invariant_I(unit_gaussian, 1e-6) == pytest.approx(2 * math.pi ** 3, rel=1e-9)
    with pytest.raises(ValueError):
        spectral_invariant_I(unit_gaussian, 0.0)
