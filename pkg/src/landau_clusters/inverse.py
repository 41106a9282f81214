"""Recovering ring averages of |Vhat|^2 from I(r), and Sobolev-norm invariants.

With ring(k) = int_0^{2 pi} |Vhat(k cos phi, k sin phi)|^2 d phi and
W(sigma) = sigma^-2 ring(1 / sigma), the invariant is a multiplicative convolution

    I(r) = int_0^inf K(r / sigma) W(sigma) d sigma / sigma,   K(s) = J0(s)^2,

discretized by the trapezoid rule in log sigma.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import BoundaryMassWarning, ConvergenceError
from .potentials import Potential
from .quadrature import legendre_on
from .radon import _frequency_cutoff, ring_average_fhat2, spectral_invariant_I
from .specfun import bessel_j0

_BOUNDARY_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class LogGrid:
    """Geometric nodes rho_min = s_0 < ... < s_{count-1} = rho_max."""

    rho_min: float
    rho_max: float
    count: int

    def __post_init__(self):
        if not (0 < self.rho_min < self.rho_max) or self.count < 2:
            raise ValueError("need 0 < rho_min < rho_max and count >= 2")

    @property
    def nodes(self) -> np.ndarray:
        return np.geomspace(self.rho_min, self.rho_max, self.count)

    @property
    def step(self) -> float:
        return math.log(self.rho_max / self.rho_min) / (self.count - 1)

    @property
    def weights(self) -> np.ndarray:
        """Trapezoid weights for int f(sigma) d sigma / sigma."""
        w = np.full(self.count, self.step)
        w[0] = w[-1] = self.step / 2
        return w

    @classmethod
    def parse(cls, text: str) -> "LogGrid":
        """'log:min:max:count' as used on the command line."""
        kind, lo, hi, count = text.split(":")
        if kind != "log":
            raise ValueError(f"unsupported grid kind {kind!r}")
        return cls(float(lo), float(hi), int(count))


@dataclass(frozen=True, eq=False)
class RingProfile:
    grid: LogGrid
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.grid.count,):
            raise ValueError("profile length does not match its grid")

    def scaled(self, c: float) -> "RingProfile":
        return RingProfile(self.grid, c * self.values)


def kernel(s):
    """K(s) = J0(s)^2."""
    j = bessel_j0(s)
    return j * j


def ring_profile(V: Potential, grid: LogGrid) -> RingProfile:
    """W(sigma) = sigma^-2 ring(1 / sigma) on the grid."""
    s = grid.nodes
    return RingProfile(grid, ring_average_fhat2(V, 1.0 / s) / (s * s))


def forward_matrix(grid: LogGrid, r_nodes) -> np.ndarray:
    """A[i, j] = K(r_i / sigma_j) * trapezoid weight_j."""
    r = np.asarray(r_nodes, dtype=float)
    A = kernel(r[:, None] / grid.nodes[None, :]) * grid.weights[None, :]
    if np.any(np.sum(A, axis=1) <= 0):
        raise ValueError("kernel matrix has an empty row on this grid")
    return A


def forward_convolve(W: RingProfile, r_nodes, *, check: bool = True) -> np.ndarray:
    """I(r) for each r by log-grid trapezoid.

    With ``check`` a BoundaryMassWarning is issued when the integrand at either
    end of the grid exceeds 1e-10 of its peak for some r.
    """
    A = forward_matrix(W.grid, r_nodes)
    terms = A * W.values[None, :]
    if check:
        peak = np.max(np.abs(terms), axis=1)
        ends = np.maximum(np.abs(terms[:, 0]), np.abs(terms[:, -1]))
        bad = ends > _BOUNDARY_TOL * np.where(peak > 0, peak, np.inf)
        if bad.any():
            warnings.warn(f"log grid truncates the integrand at {int(bad.sum())} radii "
                          f"(worst end/peak {float(np.max(ends[bad] / peak[bad])):.2e})",
                          BoundaryMassWarning, stacklevel=2)
    return terms.sum(axis=1)


@dataclass(frozen=True, eq=False)
class Deconvolution:
    profile: RingProfile
    lam: float
    residual: float
    condition: float
    clipped_fraction: float
    path: list = field(default_factory=list)
    residual_ok: bool = True


def mellin_deconvolve(I_values, r_nodes, grid: LogGrid, lam="auto", *, noise: float = 1e-8,
                      tau: float = 1.1, clip: bool = True) -> Deconvolution:
    """Ridge-regularized solve of A w = I for the ring profile on ``grid``.

    ``lam`` is either a number (relative to the largest squared singular value)
    or "auto": the largest lambda on a decade ladder whose relative residual
    stays below tau * noise (the discrepancy principle).  Negative entries are
    clipped to zero afterwards when ``clip`` is set.  ``residual`` is measured on
    the returned (possibly clipped) profile; ``residual_ok`` judges the ridge solve.
    """
    data = np.asarray(I_values, dtype=float)
    A = forward_matrix(grid, r_nodes)
    U, S, VT = np.linalg.svd(A, full_matrices=False)
    condition = float(S[0] / S[-1]) if S[-1] > 0 else math.inf
    beta = U.T @ data
    norm = float(np.linalg.norm(data))

    def solve(rel_lam):
        lam_abs = rel_lam * S[0] ** 2
        w = VT.T @ (S / (S * S + lam_abs) * beta)
        res = float(np.linalg.norm(A @ w - data)) / norm if norm > 0 else 0.0
        return w, res

    path = []
    if lam == "auto":
        chosen = None
        for rel in 10.0 ** np.arange(0, -17, -1, dtype=float):
            w, res = solve(rel)
            path.append((float(rel), res))
            if res <= tau * noise:
                chosen = (rel, w, res)
                break
        ok = chosen is not None
        if not ok:
            rel, res = min(path, key=lambda pr: pr[1])
            w, res = solve(rel)
            chosen = (rel, w, res)
        rel, w, res = chosen
    else:
        rel = float(lam)
        w, res = solve(rel)
        path.append((rel, res))
        ok = res <= tau * noise
    clipped = 0.0
    if clip:
        total = float(np.sum(np.abs(w)))
        neg = w < 0
        clipped = float(np.sum(-w[neg]) / total) if total > 0 else 0.0
        w = np.where(neg, 0.0, w)
        res = float(np.linalg.norm(A @ w - data)) / norm if norm > 0 else 0.0
    return Deconvolution(RingProfile(grid, w), float(rel), res, condition, clipped, path, ok)


def relative_l2_middle(recovered: RingProfile, truth: RingProfile) -> float:
    """Relative L2 error over the middle half of the grid (log-uniform measure)."""
    n = truth.grid.count
    mid = slice(n // 4, n - n // 4)
    diff = recovered.values[mid] - truth.values[mid]
    return float(np.linalg.norm(diff) / np.linalg.norm(truth.values[mid]))


# ---------------------------------------------------------------------------
# Sobolev norms
# ---------------------------------------------------------------------------

CONVENTIONS = {"half": 0.5, "standard": 1.0}


def sobolev_norm_sq(V: Potential, s: float, convention: str = "half", *, order: int = 256) -> float:
    """int (1 + |k|^2)^{c s} |Vhat(k)|^2 dk, with c = 1/2 ("half") or 1 ("standard")."""
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {sorted(CONVENTIONS)}")
    power = CONVENTIONS[convention] * s
    if not V.has_fourier and s > 4:
        warnings.warn("high-order Sobolev weight on a quadrature Fourier transform; "
                      "the result may be dominated by quadrature noise", RuntimeWarning, stacklevel=2)
    # the polynomial weight pushes mass outward; widen the Gaussian cutoff accordingly
    kmax = _frequency_cutoff(V, power=2.0) * (1.0 + 0.1 * max(power, 0.0))
    k, wk = legendre_on(0.0, kmax, order)
    return float(np.sum(wk * k * (1.0 + k * k) ** power * ring_average_fhat2(V, k)))


def sobolev_norm(V: Potential, s: float, convention: str = "half", **kwargs) -> float:
    """Square root of :func:`sobolev_norm_sq`."""
    return math.sqrt(sobolev_norm_sq(V, s, convention, **kwargs))


@dataclass(frozen=True)
class IsospectralReport:
    r_nodes: np.ndarray
    I1: np.ndarray
    I2: np.ndarray
    max_relative_gap: float
    worst_r: float
    isospectral: bool
    s_list: tuple = ()
    norm_gaps: Optional[np.ndarray] = None


def isospectral_compare(V1: Potential, V2: Potential, r_nodes: Sequence[float],
                        s_list: Sequence[float] = (-2, -1, 0, 1, 2), *, rtol: float = 1e-8,
                        convention: str = "half") -> IsospectralReport:
    """Compare I(r) for two potentials; if they agree, compare Sobolev norms too."""
    r = np.asarray(r_nodes, dtype=float)
    I1 = spectral_invariant_I(V1, r)
    I2 = spectral_invariant_I(V2, r)
    gaps = np.abs(I1 - I2) / np.maximum(np.abs(I1), 1e-300)
    worst = int(np.argmax(gaps))
    iso = bool(gaps[worst] <= rtol)
    norm_gaps = None
    if iso:
        n1 = np.array([sobolev_norm(V1, s, convention) for s in s_list])
        n2 = np.array([sobolev_norm(V2, s, convention) for s in s_list])
        norm_gaps = np.abs(n1 - n2) / np.maximum(np.abs(n1), 1e-300)
    return IsospectralReport(r, I1, I2, float(gaps[worst]), float(r[worst]), iso,
                             tuple(s_list), norm_gaps)


def gaussian_ring_profile_exact(grid: LogGrid, amplitude: float = 1.0, inverse_width: float = 1.0):
    """W(sigma) for a centred Gaussian, in closed form: ring(k) = 2 pi |a pi / w|^2 e^{-k^2 / (2w)}."""
    s = grid.nodes
    a, w = amplitude, inverse_width
    ring = 2 * math.pi * (a * math.pi / w) ** 2 * np.exp(-1.0 / (2 * w * s * s))
    return RingProfile(grid, ring / (s * s))


def require_converged(result: Deconvolution) -> Deconvolution:
    if not result.residual_ok:
        raise ConvergenceError(f"deconvolution residual {result.residual:.3g} above target")
    return result
