"""Weyl quantization in the Hermite basis.

Conventions.  e_k are the normalized eigenfunctions of -hbar^2 d^2/dx^2 + x^2.
The Wigner cross-transform is

    G(f, g)(u, p) = (1 / (pi hbar)) int exp(2 i v p / hbar) f(u - v) g(u + v) dv,

and the matrix of Op^W(a) is X[k, l] = <Op^W(a) e_l, e_k> = int int a G(e_l, e_k).
For real a the matrix is Hermitian; it is real only when a is even in p.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln

from .errors import ConvergenceError
from .quadrature import gauss_rule, scaled_hermite_rule
from .specfun import (_LOG_RESCALE, _RESCALE, hermite_functions,
                      weighted_laguerre_contract)


# ---------------------------------------------------------------------------
# radial symbols
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialSymbol:
    """a(x, p) = profile(sqrt(x^2 + p^2))."""

    profile: Callable
    name: str = ""

    def __call__(self, r):
        return np.asarray(self.profile(np.asarray(r, dtype=float)), dtype=float)

    def on_plane(self, x, p):
        return self(np.hypot(x, p))


def _as_radial(rho) -> RadialSymbol:
    return rho if isinstance(rho, RadialSymbol) else RadialSymbol(rho)


def laguerre_order(nmax: int) -> int:
    """Default Gauss-Laguerre order for indices up to nmax."""
    return 2 * nmax + 64


def _radial_sum(profile_at_t, nmax: int, order: int) -> np.ndarray:
    rule = gauss_rule("gauss-laguerre", order)
    t = rule.nodes
    # e^{-t} L_n(2t) is exactly the weighted Laguerre value at 2t
    values = profile_at_t(t)
    sums = weighted_laguerre_contract(nmax, 2.0 * t, rule.scaled_weights * values)
    signs = np.where(np.arange(nmax + 1) % 2, -1.0, 1.0)
    scale = np.max(np.abs(values), initial=0.0)
    return signs * sums, scale


def laguerre_transform(profile_at_t: Callable, nmax: int, *, order: int | None = None,
                       check: bool = True, rtol: float = 1e-9) -> np.ndarray:
    """(-1)^n int_0^inf f(t) e^{-t} L_n(2t) dt for n = 0..nmax.

    ``profile_at_t`` maps an array of t values to f(t).  The m -> 2m refinement
    must move each value by at most rtol relative (with an absolute floor of
    rtol * 1e-2 * max|f| for values that are themselves negligible).
    """
    m = order or laguerre_order(nmax)
    coarse, scale = _radial_sum(profile_at_t, nmax, m)
    if not check:
        return coarse
    fine, scale2 = _radial_sum(profile_at_t, nmax, 2 * m)
    floor = 1e-2 * max(scale, scale2)
    gap = np.abs(fine - coarse)
    if np.any(gap > rtol * np.maximum(np.abs(fine), floor)):
        raise ConvergenceError(f"Laguerre quadrature unsettled at order {m}", (coarse, fine))
    return coarse


def radial_eigenvalues(rho, nmax: int, hbar: float, **kwargs) -> np.ndarray:
    """Eigenvalues lambda_0..lambda_nmax of Op^W(rho(|.|)) at semiclassical hbar."""
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    rho = _as_radial(rho)
    return laguerre_transform(lambda t: rho(np.sqrt(hbar * t)), nmax, **kwargs)


def radial_eigenvalue(rho, n: int, hbar: float, **kwargs) -> float:
    """lambda_n = ((-1)^n / hbar) int rho(sqrt u) e^{-u/hbar} L_n(2u/hbar) du."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    kwargs.setdefault("order", laguerre_order(n))
    return float(radial_eigenvalues(rho, n, hbar, **kwargs)[n])


def loglog_slope(hbars, residuals) -> float:
    """Least-squares slope of log|residual| against log hbar."""
    return float(np.polyfit(np.log(hbars), np.log(np.abs(residuals)), 1)[0])


@dataclass(frozen=True)
class LimitCheck:
    n: np.ndarray
    hbar: np.ndarray
    residuals: np.ndarray
    slope: float


def radial_eigenvalue_limit_check(rho, E: float, n_list) -> LimitCheck:
    """Residuals lambda_n - rho(sqrt E) along hbar = E / (2n + 1), plus the fitted rate."""
    rho = _as_radial(rho)
    n = np.asarray(list(n_list), dtype=int)
    h = E / (2 * n + 1)
    target = float(rho(math.sqrt(E)))
    res = np.array([radial_eigenvalue(rho, int(k), float(hk)) - target for k, hk in zip(n, h)])
    nonzero = np.abs(res) > 0
    slope = loglog_slope(h[nonzero], res[nonzero]) if nonzero.sum() >= 2 else math.inf
    return LimitCheck(n, h, res, slope)


# ---------------------------------------------------------------------------
# Wigner cross-transforms
# ---------------------------------------------------------------------------

def laguerre_functions(mmax: int, alpha: int, y) -> np.ndarray:
    """sqrt(m!/(m+alpha)!) y^{alpha/2} e^{-y/2} L_m^{(alpha)}(y) for m = 0..mmax.

    These are bounded by one; computed by a normalized recurrence with a
    separate log scale.  Shape (mmax + 1, *y.shape).
    """
    y = np.asarray(y, dtype=float)
    flat = np.atleast_1d(y).ravel()
    out = np.empty((mmax + 1, flat.size))
    log_scale = -flat / 2
    if alpha:
        with np.errstate(divide="ignore"):
            log_scale = log_scale + 0.5 * alpha * np.log(flat) - 0.5 * gammaln(alpha + 1)
    prev = np.zeros_like(flat)
    cur = np.ones_like(flat)
    out[0] = np.exp(log_scale)
    for m in range(mmax):
        prev, cur = cur, (((2 * m + 1 + alpha) - flat) * cur
                          - math.sqrt(m * (m + alpha)) * prev) / math.sqrt((m + 1) * (m + 1 + alpha))
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            prev[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
        with np.errstate(divide="ignore"):
            out[m + 1] = np.sign(cur) * np.exp(np.log(np.abs(cur)) + log_scale)
    return out.reshape((mmax + 1,) + y.shape)


def wigner_cross(m: int, k: int, x, p, hbar: float):
    """G(e_m, e_k)(x, p) from the Laguerre closed form.

    For m <= k: ((-1)^m / (pi hbar)) f_m^{k-m}(2 r^2 / hbar) exp(i (k-m) theta),
    with (r, theta) the polar form of (x, p); G(e_m, e_k)(x, p) = G(e_k, e_m)(x, -p).
    The phase convention is pinned by :func:`validate_wigner_closed_form`.
    """
    if m < 0 or k < 0:
        raise ValueError("indices must be nonnegative")
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    if m > k:
        return wigner_cross(k, m, x, -p, hbar)
    alpha = k - m
    y = 2.0 * (x * x + p * p) / hbar
    f = laguerre_functions(m, alpha, y)[m]
    sign = -1.0 if m % 2 else 1.0
    out = sign / (math.pi * hbar) * f * np.exp(1j * alpha * np.arctan2(p, x))
    return out if out.ndim else complex(out)


def wigner_cross_quadrature(m: int, k: int, x: float, p: float, hbar: float, *,
                            order: int | None = None, tol: float = 1e-12,
                            max_order: int = 2048) -> complex:
    """G(e_m, e_k)(x, p) by Gauss-Hermite quadrature in v (nodes scaled by sqrt hbar).

    The phase exp(2 i v p / hbar) needs roughly (p / sqrt hbar)^2 extra nodes;
    the order is doubled until two estimates agree to ``tol``.
    """
    a = 2.0 * abs(p) / math.sqrt(hbar)
    n = order or (m + k + 32 + int(math.ceil(a * a)))
    mm = max(m, k)
    prev = None
    while n <= max_order:
        v, w = scaled_hermite_rule(n, math.sqrt(hbar))
        fa = hermite_functions(mm, x - v, hbar)[m]
        fb = hermite_functions(mm, x + v, hbar)[k]
        val = complex(np.sum(w * fa * fb * np.exp(2j * v * p / hbar)) / (math.pi * hbar))
        if prev is not None and abs(val - prev) <= tol / hbar:
            return val
        prev, n = val, 2 * n
    raise ConvergenceError("Wigner quadrature did not settle", (prev, val))


def validate_wigner_closed_form(hbar: float = 0.3, points: int = 20, max_index: int = 12,
                                seed: int = 0, tol: float = 1e-8) -> float:
    """Compare the closed form with the integral at random (m, k, x, p); return max gap."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(points):
        m, k = (int(i) for i in rng.integers(0, max_index + 1, size=2))
        x, p = rng.uniform(-2.0, 2.0, size=2) * math.sqrt(hbar * (max_index + 1))
        gap = abs(wigner_cross(m, k, x, p, hbar) - wigner_cross_quadrature(m, k, x, p, hbar))
        worst = max(worst, gap * math.pi * hbar)
    if worst > tol:
        raise ConvergenceError(f"closed-form Wigner transform disagrees by {worst:.3g}")
    return worst


def wigner_table(nmax: int, x, p, hbar: float) -> np.ndarray:
    """T[m, k, ...] = G(e_m, e_k)(x, p) for m, k <= nmax."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    shape = np.broadcast(x, p).shape
    xf, pf = (np.broadcast_to(a, shape).ravel() for a in (x, p))
    y = 2.0 * (xf * xf + pf * pf) / hbar
    phase = np.exp(1j * np.arctan2(pf, xf))
    out = np.empty((nmax + 1, nmax + 1, xf.size), dtype=complex)
    signs = np.where(np.arange(nmax + 1) % 2, -1.0, 1.0) / (math.pi * hbar)
    for alpha in range(nmax + 1):
        f = laguerre_functions(nmax - alpha, alpha, y)
        rot = phase ** alpha
        idx = np.arange(nmax + 1 - alpha)
        band = signs[idx, None] * f
        out[idx, idx + alpha] = band * rot
        out[idx + alpha, idx] = band * np.conj(rot)
    return out.reshape((nmax + 1, nmax + 1) + shape)


# ---------------------------------------------------------------------------
# symbol grids and matrices
# ---------------------------------------------------------------------------

def default_grid_order(max_index: int) -> int:
    return max(2 * max_index + 32, 64)


@dataclass(frozen=True, eq=False)
class SymbolGrid:
    """Tensor Gauss-Hermite phase-plane grid with nodes scaled by sqrt(hbar).

    ``weights`` integrate plain functions of (x, p); ``x`` and ``p`` are the
    flattened node coordinates.
    """

    hbar: float
    order: int
    x: np.ndarray
    p: np.ndarray
    weights: np.ndarray

    @classmethod
    def build(cls, hbar: float, order: int) -> "SymbolGrid":
        z, w = scaled_hermite_rule(order, math.sqrt(hbar))
        X, P = np.meshgrid(z, z, indexing="ij")
        W = np.outer(w, w)
        return cls(hbar, order, X.ravel(), P.ravel(), W.ravel())

    @classmethod
    def for_basis(cls, hbar: float, size: int, order: int | None = None) -> "SymbolGrid":
        return cls.build(hbar, order or default_grid_order(size - 1))

    def sample(self, symbol: Callable) -> np.ndarray:
        return np.asarray(symbol(self.x, self.p), dtype=float)

    @property
    def size(self) -> int:
        return self.x.size


def weyl_matrix(grid: SymbolGrid, values, size: int) -> np.ndarray:
    """Hermitian matrix X[k, l] = <Op^W(a) e_l, e_k>, k, l < size, for real a on grid."""
    values = np.asarray(values)
    if np.iscomplexobj(values):
        raise ValueError("symbol values must be real")
    h = grid.hbar
    c = grid.weights * values
    y = 2.0 * (grid.x ** 2 + grid.p ** 2) / h
    theta = np.arctan2(grid.p, grid.x)
    signs = np.where(np.arange(size) % 2, -1.0, 1.0) / (math.pi * h)
    X = np.empty((size, size), dtype=complex)
    for alpha in range(size):
        f = laguerre_functions(size - 1 - alpha, alpha, y)
        # lower band: X[l + alpha, l] pairs with G(e_l, e_{l + alpha})
        band = signs[: size - alpha] * (f @ (c * np.exp(1j * alpha * theta)))
        idx = np.arange(size - alpha)
        X[idx + alpha, idx] = band
        X[idx, idx + alpha] = np.conj(band)
    return X


def weyl_matrix_element(grid: SymbolGrid, values, m: int, k: int) -> complex:
    """<Op^W(a) e_m, e_k> as the weighted sum of a against G(e_m, e_k)."""
    g = wigner_cross(m, k, grid.x, grid.p, grid.hbar)
    return complex(np.sum(grid.weights * np.asarray(values) * g))


def real_part_checked(X: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Real part of a matrix that should be real (p-even symbols); raises otherwise."""
    scale = max(1.0, float(np.max(np.abs(X), initial=0.0)))
    resid = float(np.max(np.abs(np.imag(X)), initial=0.0))
    if resid > tol * scale:
        raise ConvergenceError(f"imaginary residual {resid:.3g} exceeds tolerance")
    return np.real(X).copy()


def hermiticity_gap(X: np.ndarray) -> float:
    return float(np.max(np.abs(X - X.conj().T), initial=0.0))


def matrix_to_csv(X: np.ndarray, hbar: float, n: int | None = None) -> str:
    X = np.asarray(X)
    head = f"# hbar={hbar!r} n={n} size={X.shape[0]}"
    rows = []
    for row in X:
        if np.iscomplexobj(X):
            rows.append(",".join(f"{v.real:.17g}{v.imag:+.17g}j" for v in row))
        else:
            rows.append(",".join(f"{v:.17g}" for v in row))
    return "\n".join([head] + rows) + "\n"
