"""The reduced operator T_n on the n-th Landau level.

Its Weyl symbol is the Laguerre transform of the averaged potential,

    Phi(xi, n) = ((-1)^n / hbar) int_0^inf V~(xi; u) e^{-u/hbar} L_n(2u/hbar) du,

evaluated after t = u / hbar by Gauss-Laguerre quadrature.  T_n is realized in
the Hermite basis of x2 at the same hbar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConvergenceError, ResourceCapError
from .potentials import Potential
from .quadrature import gauss_rule, legendre_on
from .radon import check_map, circle_average, radon_transform
from .specfun import SemiclassicalPoint, weighted_laguerre
from .weyl import (SymbolGrid, default_grid_order, hermiticity_gap, laguerre_order,
                   loglog_slope, radial_eigenvalues, weyl_matrix)

# relative size below which V is treated as zero when sizing grids and bases
_NEGLIGIBLE = 1e-10
DEFAULT_MEMORY_CAP = 2 * 1024 ** 3


# ---------------------------------------------------------------------------
# the symbol
# ---------------------------------------------------------------------------

def _phi_sum(V: Potential, x2, p2, pt: SemiclassicalPoint, order: int):
    rule = gauss_rule("gauss-laguerre", order)
    t = rule.nodes
    h, n = pt.hbar, pt.n
    kernel = rule.scaled_weights * weighted_laguerre(n, 2.0 * t)
    if n % 2:
        kernel = -kernel
    y0, y1 = check_map(x2, p2)
    radius = np.sqrt(h * t / 2.0)
    vals = radon_transform(V, (y0[..., None], y1[..., None]), radius)
    return vals @ kernel


def reduced_symbol(V: Potential, xi, pt: SemiclassicalPoint, *, order: Optional[int] = None,
                   check: bool = True, rtol: float = 1e-9):
    """Phi(xi, n) at a PhasePoint / (x2, p2) pair of arrays.

    With ``check`` the Gauss-Laguerre order is doubled once and the two values
    must agree to rtol (relative, floored at 1e-3 sup|V|).
    """
    if hasattr(xi, "x2"):
        x2, p2 = np.asarray(xi.x2, float), np.asarray(xi.p2, float)
    else:
        x2, p2 = (np.asarray(a, dtype=float) for a in xi)
    m = order or laguerre_order(pt.n)
    coarse = _phi_sum(V, x2, p2, pt, m)
    if check:
        fine = _phi_sum(V, x2, p2, pt, 2 * m)
        floor = 1e-3 * V.sup_norm
        if np.any(np.abs(fine - coarse) > rtol * np.maximum(np.abs(fine), floor)):
            raise ConvergenceError(f"reduced symbol unsettled at order {m}", (coarse, fine))
    return float(coarse) if np.ndim(coarse) == 0 else coarse


@dataclass(eq=False)
class ReducedSymbol:
    """Phi(., n) for one potential and semiclassical point, cached per exact grid."""

    V: Potential
    pt: SemiclassicalPoint
    order: Optional[int] = None
    _cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, x2, p2):
        x2 = np.asarray(x2, dtype=float)
        p2 = np.asarray(p2, dtype=float)
        key = (x2.shape, x2.tobytes(), p2.shape, p2.tobytes())
        if key not in self._cache:
            self._cache[key] = reduced_symbol(self.V, (x2, p2), self.pt, order=self.order)
        return self._cache[key]


@dataclass(frozen=True)
class RateFit:
    n: np.ndarray
    hbar: np.ndarray
    residuals: np.ndarray
    slope: float
    converged: bool = False


def symbol_residual_rate(V: Potential, xi, E: float, n_list) -> RateFit:
    """Fit log|Phi(xi, n) - V~(xi; E)| against log hbar along hbar(2n+1) = E."""
    n = np.asarray(list(n_list), dtype=int)
    if n.size < 2:
        raise ValueError("need at least two n values")
    target = circle_average(V, xi, E)
    res = np.array([reduced_symbol(V, xi, SemiclassicalPoint(E, int(k))) - target for k in n])
    h = E / (2 * n + 1)
    if np.all(np.abs(res) < 1e-12):
        return RateFit(n, h, res, math.nan, converged=True)
    return RateFit(n, h, res, loglog_slope(h, res))


def tail_truncation_check(V: Potential, xi, pt: SemiclassicalPoint, M_cut: float,
                          order: Optional[int] = None) -> float:
    """|part of the Laguerre integral for Phi coming from u > M_cut|.

    The tail is integrated exactly by shifting a Gauss-Laguerre rule to start at
    t = M_cut / hbar.
    """
    if not M_cut > pt.E:
        raise ValueError("M_cut must exceed E")
    h, n = pt.hbar, pt.n
    rule = gauss_rule("gauss-laguerre", order or laguerre_order(n))
    t = M_cut / h + rule.nodes
    # exp(-s) * e^{s} weights: integrate e^{-t} L_n(2t) V~ over t >= M_cut / h
    kernel = rule.scaled_weights * weighted_laguerre(n, 2.0 * t)
    x2, p2 = (xi.x2, xi.p2) if hasattr(xi, "x2") else xi
    y0, y1 = check_map(x2, p2)
    vals = radon_transform(V, (np.full_like(t, y0), np.full_like(t, y1)), np.sqrt(h * t / 2.0))
    return float(abs(np.dot(kernel, vals)))


# ---------------------------------------------------------------------------
# integrals over the xi plane
# ---------------------------------------------------------------------------

def xi_window(V: Potential, E: float, tol: float = _NEGLIGIBLE):
    """Box in the xi plane outside which V~(.; E) is below tol * sup|V|."""
    r = math.sqrt(E / 2.0)
    pad = r + math.sqrt(math.log(1.0 / tol) / V.widths[0])
    centers = np.asarray(V.centers, dtype=float)
    # xi = sqrt2 * (c_y, c_x) for a circle centred at c
    images = math.sqrt(2.0) * centers[:, ::-1]
    lo = images.min(axis=0) - math.sqrt(2.0) * pad
    hi = images.max(axis=0) + math.sqrt(2.0) * pad
    return lo, hi


def coverage_radius(V: Potential, E: float, tol: float = _NEGLIGIBLE) -> float:
    """Radius about the origin of a disk containing the xi-support of V~(.; E)."""
    r = math.sqrt(E / 2.0)
    pad = r + math.sqrt(math.log(1.0 / tol) / V.widths[0])
    centers = np.asarray(V.centers, dtype=float)
    return float(math.sqrt(2.0) * (np.max(np.hypot(centers[:, 0], centers[:, 1])) + pad))


def xi_integral(V: Potential, E: float, func: Callable = lambda v: v, points: int = 241) -> float:
    """int func(V~(xi; E)) d xi by the trapezoid rule on a box where V~ has decayed."""
    lo, hi = xi_window(V, E)
    a = np.linspace(lo[0], hi[0], points)
    b = np.linspace(lo[1], hi[1], points)
    A, B = np.meshgrid(a, b, indexing="ij")
    vals = func(circle_average(V, (A, B), E))
    return float(np.sum(vals) * (a[1] - a[0]) * (b[1] - b[0]))


# ---------------------------------------------------------------------------
# matrices and spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ClusterMeasure:
    """Eigenvalues with uniform weights, tagged by where they came from."""

    eigenvalues: np.ndarray
    provenance: str
    metadata: dict = field(default_factory=dict)

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.eigenvalues.size, 1.0 / max(self.eigenvalues.size, 1))

    def __len__(self) -> int:
        return self.eigenvalues.size


def radial_profile(V: Potential, pt: SemiclassicalPoint, **kwargs) -> Callable:
    """s -> Phi((s, 0), n); Phi is radial in xi when V is radial about the origin."""
    return lambda s: reduced_symbol(V, (s, np.zeros_like(s)), pt, **kwargs)


def reduced_eigenvalues_radial(V: Potential, pt: SemiclassicalPoint, M: int) -> np.ndarray:
    """Diagonal of T_n (its eigenvalues) for V radial about the origin, j < M."""
    if not V.is_radial:
        raise ValueError("potential is not radial about the origin")
    return radial_eigenvalues(radial_profile(V, pt), M - 1, pt.hbar)


def grid_memory_estimate(M: int, q: Optional[int] = None) -> int:
    q = q or default_grid_order(M - 1)
    return 8 * q * q * (3 * M + 16)


def reduced_matrix(V: Potential, pt: SemiclassicalPoint, M: int, *, grid_order: Optional[int] = None,
                   method: str = "auto", memory_cap: int = DEFAULT_MEMORY_CAP,
                   tol: float = 1e-9) -> np.ndarray:
    """M x M Hermitian matrix of T_n in the Hermite basis e_0..e_{M-1} of x2.

    ``method`` is "radial" (diagonal, V radial about the origin), "grid" (symbol
    sampled on a tensor Gauss-Hermite grid) or "auto".  The grid route gives a
    complex Hermitian matrix; it is real when Phi is even in p2.
    """
    if M < 1:
        raise ValueError("basis size must be positive")
    if method == "auto":
        method = "radial" if V.is_radial else "grid"
    if method == "radial":
        return np.diag(reduced_eigenvalues_radial(V, pt, M))
    if method != "grid":
        raise ValueError(f"unknown method {method!r}")
    need = grid_memory_estimate(M, grid_order)
    if need > memory_cap:
        raise ResourceCapError(f"grid route needs ~{need / 2**20:.0f} MiB, cap is {memory_cap / 2**20:.0f} MiB")
    grid = SymbolGrid.for_basis(pt.hbar, M, grid_order)
    values = reduced_symbol(V, (grid.x, grid.p), pt)
    X = weyl_matrix(grid, values, M)
    gap = hermiticity_gap(X)
    if gap > tol * max(1.0, float(np.max(np.abs(X), initial=0.0))):
        raise ConvergenceError(f"reduced matrix not Hermitian (gap {gap:.3g})")
    if float(np.max(np.abs(X.imag), initial=0.0)) == 0.0:
        return X.real.copy()
    return X


def reduced_spectrum(V: Potential, pt: SemiclassicalPoint, M: int = 64, **kwargs) -> ClusterMeasure:
    """Eigenvalues of T_n truncated to M basis functions, ascending."""
    method = kwargs.get("method", "auto")
    if method == "radial" or (method == "auto" and V.is_radial):
        eig = np.sort(reduced_eigenvalues_radial(V, pt, M))
        route = "radial"
    else:
        X = reduced_matrix(V, pt, M, **kwargs)
        try:
            eig = np.linalg.eigvalsh(X)
        except np.linalg.LinAlgError as exc:  # pragma: no cover
            raise ConvergenceError("eigensolver failed") from exc
        route = "grid"
    meta = {"E": pt.E, "n": pt.n, "hbar": pt.hbar, "basis_size": M, "route": route,
            "laguerre_order": laguerre_order(pt.n)}
    return ClusterMeasure(eig, "reduced", meta)


# ---------------------------------------------------------------------------
# traces and the Szego limit
# ---------------------------------------------------------------------------

def basis_size_for(V: Potential, pt: SemiclassicalPoint, tol: float = _NEGLIGIBLE) -> int:
    """Smallest M whose Hermite basis covers the xi-support of V~(.; E).

    The first M oscillator states fill the disk of radius sqrt(hbar (2M + 1)).
    """
    R = coverage_radius(V, pt.E, tol)
    return max(1, int(math.ceil((R * R / pt.hbar - 1.0) / 2.0)))


@dataclass(frozen=True)
class MomentComparison:
    ell: int
    hbar: float
    trace: float
    integral: float

    @property
    def scaled_gap(self) -> float:
        """2 pi hbar tr(T^ell) - int V~^ell."""
        return 2 * math.pi * self.hbar * self.trace - self.integral


def reduced_moments(V: Potential, pt: SemiclassicalPoint, M: Optional[int], ell: int,
                    spectrum: Optional[ClusterMeasure] = None) -> MomentComparison:
    """tr T_n^ell (from eigenvalues) next to (1/(2 pi hbar)) int V~^ell."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    spec = spectrum or reduced_spectrum(V, pt, M or basis_size_for(V, pt))
    trace = float(np.sum(spec.eigenvalues ** ell))
    integral = xi_integral(V, pt.E, lambda v: v ** ell)
    return MomentComparison(ell, pt.hbar, trace, integral / (2 * math.pi * pt.hbar))


def bump(s):
    """exp(1 - 1/(1 - s^2)) on |s| < 1, zero elsewhere; bump(0) = 1."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    inside = np.abs(s) < 1
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


def poly_bump(k: int, T: float) -> Callable:
    """t^k bump(t / T): smooth, supported in [-T, T], vanishing at 0 for k >= 1."""
    if k < 1:
        raise ValueError("need k >= 1 so that rho(t)/t stays continuous")
    return lambda t: np.asarray(t, dtype=float) ** k * bump(np.asarray(t, dtype=float) / T)


def monomial(k: int) -> Callable:
    return lambda t: np.asarray(t, dtype=float) ** k


@dataclass(frozen=True)
class SzegoRow:
    n: int
    hbar: float
    basis_size: int
    trace_side: float
    integral_side: float

    @property
    def gap(self) -> float:
        return self.trace_side - self.integral_side


def szego_check(V: Potential, E: float, rho: Callable, n_list,
                M_rule: Optional[Callable] = None) -> list:
    """hbar sum rho(eig T_n) against (1/2 pi) int rho(V~(xi; E)) d xi for each n.

    ``M_rule(pt)`` picks the basis size; by default the basis is sized to cover
    the support of V~ at each hbar (see :func:`basis_size_for`).
    """
    integral = xi_integral(V, E, rho) / (2 * math.pi)
    rows = []
    for n in n_list:
        pt = SemiclassicalPoint(E, int(n))
        M = int(M_rule(pt)) if M_rule else basis_size_for(V, pt)
        eig = reduced_spectrum(V, pt, M).eigenvalues
        rows.append(SzegoRow(pt.n, pt.hbar, M, float(pt.hbar * np.sum(rho(eig))), integral))
    return rows


# ---------------------------------------------------------------------------
# second-order Taylor remainder
# ---------------------------------------------------------------------------

def taylor_remainder(d2f: Callable, E: float, t, order: int = 32):
    """R(t) = int_0^1 int_0^1 u f''(u v (t - E) + E) du dv (tensor Gauss-Legendre).

    Then f(t) = f(E) + (t - E) f'(E) + (t - E)^2 R(t) identically.
    """
    t = np.asarray(t, dtype=float)
    x, w = legendre_on(0.0, 1.0, order)
    U, Vv = np.meshgrid(x, x, indexing="ij")
    W = np.outer(w, w) * U
    arg = (U * Vv)[..., None] * (t.ravel() - E)[None, None, :] + E
    out = np.tensordot(W, d2f(arg), axes=([0, 1], [0, 1]))
    return out.reshape(t.shape) if t.ndim else float(out[0])
