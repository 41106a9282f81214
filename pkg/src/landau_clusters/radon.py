"""Circular Radon transform of a potential and the invariant I(r).

Phase points are ``xi = (x2, p2)``; the circle they label is centred at
``xi_check = (p2, x2) / sqrt(2)`` with radius ``sqrt(E / 2)``.  That swap is done
here and nowhere else.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError
from .potentials import Potential, angular_average, fourier_transform
from .quadrature import legendre_on, trapezoid_circle
from .specfun import bessel_j0

# exp(-TAIL) ~ 1e-16, far below every tolerance quoted downstream
_TAIL = 37.0


@dataclass(frozen=True)
class PhasePoint:
    x2: float
    p2: float

    def check(self) -> tuple:
        """Centre of the classical orbit in the plane of V."""
        return self.p2 / math.sqrt(2.0), self.x2 / math.sqrt(2.0)


def energy_to_radius(E: float) -> float:
    return math.sqrt(E / 2.0)


def radius_to_energy(r: float) -> float:
    return 2.0 * r * r


def check_map(x2, p2):
    """(x2, p2) -> (p2, x2) / sqrt(2), vectorized."""
    s = 1.0 / math.sqrt(2.0)
    return np.asarray(p2, dtype=float) * s, np.asarray(x2, dtype=float) * s


def radon_transform(V: Potential, y, r, *, start: int = 128, tol: float = 1e-12,
                    max_count: int = 1 << 14):
    """R_r(V)(y): average of V over the circle of radius r about y.

    ``y`` is a pair of coordinate arrays.  Uses the potential's closed form when
    it has one, otherwise a periodic trapezoid rule with 2M points, doubling M
    until successive values agree to ``tol``.
    """
    y0, y1 = (np.asarray(c, dtype=float) for c in y)
    r = np.asarray(r, dtype=float)
    if V.circle_average_oracle is not None:
        return V.circle_average_oracle(y0, y1, r)
    count = 2 * start
    previous = angular_average(V, y0, y1, r, count)
    while count < max_count:
        count *= 2
        value = angular_average(V, y0, y1, r, count)
        if np.max(np.abs(value - previous), initial=0.0) <= tol * max(1.0, V.sup_norm):
            return value
        previous = value
    raise ConvergenceError("angular trapezoid rule did not settle", (previous, value))


def circle_average(V: Potential, xi, E):
    """Averaged potential V~(xi; E) at a PhasePoint or a pair of (x2, p2) arrays."""
    E_arr = np.asarray(E, dtype=float)
    if np.any(E_arr <= 0):
        raise ValueError("energy must be positive")
    if isinstance(xi, PhasePoint):
        out = radon_transform(V, xi.check(), np.sqrt(E_arr / 2.0))
        return float(out) if np.ndim(out) == 0 else out
    y = check_map(*xi)
    return radon_transform(V, y, np.sqrt(E_arr / 2.0))


def circle_average_parametrized(V: Potential, X2, P2, E, count: int = 512):
    """The same average via the orbit parametrization over half a period.

    (1/pi) int_0^pi V(P2/sqrt2 + r sin 2t, X2/sqrt2 + r cos 2t) dt, r = sqrt(E/2).
    """
    r = math.sqrt(E / 2.0)
    t = math.pi * np.arange(count) / count
    a = P2 / math.sqrt(2.0) + r * np.sin(2 * t)
    b = X2 / math.sqrt(2.0) + r * np.cos(2 * t)
    return float(np.mean(V(a, b)))


# ---------------------------------------------------------------------------
# frequency side
# ---------------------------------------------------------------------------

def _frequency_cutoff(V: Potential, power: float = 1.0) -> float:
    """Radius beyond which |Vhat|^power < exp(-TAIL) relative to its peak."""
    w = V.widths[1]
    return math.sqrt(4.0 * w * _TAIL / power)


def radon_via_fourier(V: Potential, y, r: float, *, order: int = 160, angles: int = 128):
    """(2 pi)^-2 int exp(i y.k) J0(r|k|) Vhat(k) dk in polar coordinates."""
    if not r > 0:
        raise ValueError("radius must be positive")
    kmax = _frequency_cutoff(V)
    k, wk = legendre_on(0.0, kmax, order)
    theta, wt = trapezoid_circle(angles)
    KX = np.outer(k, np.cos(theta))
    KY = np.outer(k, np.sin(theta))
    vhat = fourier_transform(V, KX, KY)
    tail = np.max(np.abs(vhat[-1]))
    peak = np.max(np.abs(vhat))
    if peak > 0 and tail > 1e-12 * peak:
        raise ConvergenceError("frequency cutoff too small for this potential", (tail, peak))
    base = (wk * k * bessel_j0(r * k))[:, None] * wt[None, :] * vhat * (2 * math.pi)
    y0 = np.atleast_1d(np.asarray(y[0], dtype=float))
    y1 = np.atleast_1d(np.asarray(y[1], dtype=float))
    out = np.empty(np.broadcast(y0, y1).shape)
    for idx, (a, b) in enumerate(zip(*np.broadcast_arrays(y0, y1))):
        phase = np.exp(1j * (a * KX + b * KY))
        out.flat[idx] = np.sum(base * phase).real
    out /= (2 * math.pi) ** 2
    return float(out[0]) if np.ndim(y[0]) == 0 else out.reshape(np.broadcast(*y).shape)


def ring_average_fhat2(V: Potential, rho, count: int = 256):
    """int_0^{2 pi} |Vhat(rho cos phi, rho sin phi)|^2 d phi (trapezoid in phi)."""
    rho = np.asarray(rho, dtype=float)
    theta, w = trapezoid_circle(count)
    vals = fourier_transform(V, rho[..., None] * np.cos(theta), rho[..., None] * np.sin(theta))
    return 2 * math.pi * (np.abs(vals) ** 2 @ w)


def spectral_invariant_I(V: Potential, r, *, order: int = 240, verify: bool = False,
                         rtol: float = 1e-5):
    """I(r) = int J0(r|k|)^2 |Vhat(k)|^2 dk.

    With ``verify`` the space-side value (2 pi)^2 int R_r(V)(y)^2 dy is also
    computed and a ConvergenceError raised when the routes disagree beyond rtol.
    """
    r_arr = np.atleast_1d(np.asarray(r, dtype=float))
    if np.any(r_arr <= 0):
        raise ValueError("radius must be positive")
    k, wk = legendre_on(0.0, _frequency_cutoff(V, power=2.0), order)
    ring = ring_average_fhat2(V, k)
    J = bessel_j0(np.outer(r_arr, k))
    out = (J * J) @ (wk * k * ring)
    if verify:
        space = np.array([spectral_invariant_I_space(V, ri) for ri in r_arr])
        gap = np.abs(space - out) / np.maximum(np.abs(out), 1e-300)
        if np.any(gap > rtol):
            raise ConvergenceError("I(r) routes disagree", (out, space))
    return float(out[0]) if np.ndim(r) == 0 else out


def spectral_invariant_I_space(V: Potential, r: float, *, order: int = 200) -> float:
    """(2 pi)^2 int R_r(V)(y)^2 dy on a tensor Gauss-Legendre box."""
    centers = np.asarray(V.centers, dtype=float)
    pad = r + math.sqrt(_TAIL / (2.0 * V.widths[0]))
    lo = centers.min(axis=0) - pad
    hi = centers.max(axis=0) + pad
    x, wx = legendre_on(lo[0], hi[0], order)
    y, wy = legendre_on(lo[1], hi[1], order)
    X, Y = np.meshgrid(x, y, indexing="ij")
    R = radon_transform(V, (X, Y), r)
    return float((2 * math.pi) ** 2 * (wx @ (R * R) @ wy))
