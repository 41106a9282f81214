"""Special functions: Laguerre and Hermite families, Airy zeros, Bessel values.

Large-argument Laguerre and Hermite values are produced by three-term
recurrences that carry a separate logarithmic scale, so the exponential
weight can be folded in at the end without overflow or premature underflow.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.linalg import eigh_tridiagonal
from scipy.optimize import brentq

from .errors import ConvergenceError

_RESCALE = 1e100
_LOG_RESCALE = math.log(_RESCALE)


@dataclass(frozen=True)
class SemiclassicalPoint:
    """The coupled triple (E, n, hbar) with hbar * (2n + 1) = E."""

    E: float
    n: int

    def __post_init__(self):
        if not self.E > 0:
            raise ValueError(f"energy must be positive, got {self.E}")
        if int(self.n) != self.n or self.n < 0:
            raise ValueError(f"Landau index must be a nonnegative integer, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    @property
    def hbar(self) -> float:
        return self.E / (2 * self.n + 1)

    @property
    def B(self) -> float:
        """Magnetic field strength, B = 2 / hbar."""
        return 2.0 / self.hbar


# ---------------------------------------------------------------------------
# Laguerre polynomials
# ---------------------------------------------------------------------------

def laguerre_eval(n: int, x):
    """L_n(x) with L_n(0) = 1, by the three-term recurrence in difference form.

    Only suitable where L_n(x) itself is representable; use
    :func:`weighted_laguerre` for large arguments.
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    cur = np.ones_like(x)
    diff = np.zeros_like(x)
    for k in range(n):
        diff = (k * diff - x * cur) / (k + 1)
        cur = cur + diff
    return cur if cur.ndim else float(cur)


def _scaled_laguerre(n: int, t: np.ndarray):
    """Return (L_n, L_{n-1}) mantissas and a log scale: L_k = mant * exp(scale)."""
    cur, diff, log_scale = _scaled_laguerre_diff(n, t)
    return cur, cur - diff, log_scale


def _scaled_laguerre_diff(n: int, t: np.ndarray):
    """Mantissas of L_n and D_n = L_n - L_{n-1}, with a shared log scale.

    Uses (k+1) D_{k+1} = k D_k - t L_k, L_{k+1} = L_k + D_{k+1}: algebraically the
    usual recurrence, but t never gets added to the much larger 2k+1, so small
    arguments keep their full relative precision.
    """
    cur = np.ones_like(t)
    diff = np.zeros_like(t)
    log_scale = np.zeros_like(t)
    for k in range(n):
        diff = (k * diff - t * cur) / (k + 1)
        cur = cur + diff
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            diff[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
    return cur, diff, log_scale


def _apply_scale(mant, log_scale):
    with np.errstate(divide="ignore"):
        return np.sign(mant) * np.exp(np.log(np.abs(mant)) + log_scale)


def weighted_laguerre(n: int, t):
    """exp(-t/2) * L_n(t), finite for every t >= 0 even when L_n(t) overflows."""
    if n < 0:
        raise ValueError("degree must be nonnegative")
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise ValueError("weighted_laguerre needs t >= 0")
    flat = np.atleast_1d(t).astype(float).copy()
    mant, _, log_scale = _scaled_laguerre(n, flat)
    out = _apply_scale(mant, log_scale - flat / 2)
    return out.reshape(t.shape) if t.ndim else float(out[0])


def weighted_laguerre_table(nmax: int, t) -> np.ndarray:
    """Rows k = 0..nmax of exp(-t/2) L_k(t); shape (nmax + 1, *t.shape)."""
    t = np.asarray(t, dtype=float)
    flat = np.atleast_1d(t).ravel().astype(float)
    out = np.empty((nmax + 1, flat.size))
    diff = np.zeros_like(flat)
    cur = np.ones_like(flat)
    log_scale = -flat / 2
    out[0] = np.exp(log_scale)
    for k in range(nmax):
        diff = (k * diff - flat * cur) / (k + 1)
        cur = cur + diff
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            diff[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
        out[k + 1] = _apply_scale(cur, log_scale)
    return out.reshape((nmax + 1,) + t.shape)


def weighted_laguerre_contract(nmax: int, t, vec) -> np.ndarray:
    """sum_i vec_i exp(-t_i/2) L_k(t_i) for k = 0..nmax, without storing the table."""
    t = np.asarray(t, dtype=float).ravel()
    vec = np.asarray(vec, dtype=float).ravel()
    out = np.empty(nmax + 1)
    diff = np.zeros_like(t)
    cur = np.ones_like(t)
    log_scale = -t / 2
    out[0] = np.dot(np.exp(log_scale), vec)
    for k in range(nmax):
        diff = (k * diff - t * cur) / (k + 1)
        cur = cur + diff
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            diff[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
        out[k + 1] = np.dot(_apply_scale(cur, log_scale), vec)
    return out


def psi_eval(pt: SemiclassicalPoint, u):
    """psi_n(u) = ((-1)^n / hbar) exp(-u/hbar) L_n(2u/hbar) for u >= 0."""
    h = pt.hbar
    sign = -1.0 if pt.n % 2 else 1.0
    return sign / h * weighted_laguerre(pt.n, 2 * np.asarray(u, dtype=float) / h)


@dataclass(frozen=True)
class LaguerreZeroSet:
    n: int
    zeros: np.ndarray

    @property
    def nu(self) -> float:
        """Right end of the oscillatory region, 4n + 2."""
        return 4.0 * self.n + 2.0


def _laguerre_jacobi(n: int):
    k = np.arange(n)
    return 2.0 * k + 1.0, np.arange(1, n, dtype=float)


def _polish_laguerre_nodes(n: int, x: np.ndarray, steps: int = 2) -> np.ndarray:
    # Newton on L_n using x L_n' = n (L_n - L_{n-1}); ratio is scale-free.
    for _ in range(steps):
        ln, dn, _ = _scaled_laguerre_diff(n, x.copy())
        x = x - x * ln / (n * dn)
    return x


def laguerre_zeros(n: int) -> LaguerreZeroSet:
    """Zeros of L_n as eigenvalues of the Jacobi matrix, ascending."""
    if n < 1:
        raise ValueError("need n >= 1")
    d, e = _laguerre_jacobi(n)
    try:
        x = eigh_tridiagonal(d, e, eigvals_only=True)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"Jacobi eigensolver failed for n={n}") from exc
    if x.size != n:
        raise ConvergenceError(f"eigensolver returned {x.size} of {n} zeros")
    x = np.sort(_polish_laguerre_nodes(n, np.sort(x)))
    return LaguerreZeroSet(n=n, zeros=x)


def zero_counting_cdf(n: int, x) -> np.ndarray:
    """(1/n) #{k : lambda_{n,k} <= 4 n x}."""
    zeros = laguerre_zeros(n).zeros
    x = np.asarray(x, dtype=float)
    return np.searchsorted(zeros, 4.0 * n * x, side="right") / n


def zero_counting_limit(x) -> np.ndarray:
    """(2/pi) int_0^x t^{-1/2} (1-t)^{1/2} dt = (2/pi)(arcsin sqrt x + sqrt(x(1-x)))."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    return 2.0 / np.pi * (np.arcsin(np.sqrt(x)) + np.sqrt(x * (1.0 - x)))


# Middle coefficient of the Airy-edge law.  The three-term expansion is only
# O(1/n)-accurate with 2^{2/3}; the variant with 2^{1/3} drifts like n^{1/3}.
EDGE_COEFFICIENTS = {"two-thirds": 2 ** (2 / 3), "one-third": 2 ** (1 / 3)}


def edge_zero_prediction(n: int, m: int, variant: str = "two-thirds") -> float:
    """Airy-edge approximation nu + c a_m nu^{1/3} + (1/5) 2^{4/3} a_m^2 nu^{-1/3}."""
    c = EDGE_COEFFICIENTS[variant]
    nu = 4.0 * n + 2.0
    a = airy_negative_zero(m)
    return nu + c * a * nu ** (1 / 3) + 0.2 * 2 ** (4 / 3) * a * a * nu ** (-1 / 3)


def edge_zero_check(n: int, m: int, variant: str = "two-thirds") -> float:
    """Residual of the m-th largest Laguerre zero against the Airy-edge law."""
    if not 1 <= m <= n:
        raise ValueError("need 1 <= m <= n")
    zeros = laguerre_zeros(n).zeros
    return float(zeros[n - m] - edge_zero_prediction(n, m, variant))


def psi_last_zero_residual(pt: SemiclassicalPoint, variant: str = "two-thirds") -> float:
    """mu_{n,n} minus its three-term expansion in hbar; O(hbar^2) for the default coefficient.

    mu = (hbar/2) lambda_{n,n}; the middle term is c 2^{-2/3} E^{1/3} a_1 hbar^{2/3},
    i.e. E^{1/3} a_1 hbar^{2/3} with the default coefficient.
    """
    E, h, n = pt.E, pt.hbar, pt.n
    a1 = airy_negative_zero(1)
    c = EDGE_COEFFICIENTS[variant] * 2 ** (-2 / 3)
    mu = h / 2 * laguerre_zeros(n).zeros[-1]
    pred = E + c * E ** (1 / 3) * a1 * h ** (2 / 3) + E ** (-1 / 3) * a1 ** 2 / 5 * h ** (4 / 3)
    return float(mu - pred)


# ---------------------------------------------------------------------------
# Hermite functions
# ---------------------------------------------------------------------------

def hermite_functions(nmax: int, x, hbar: float = 1.0) -> np.ndarray:
    """e_k(x) for k = 0..nmax, L2-normalized eigenfunctions of -hbar^2 d^2 + x^2.

    Returned shape is (nmax + 1, *x.shape).
    """
    if hbar <= 0:
        raise ValueError("hbar must be positive")
    x = np.asarray(x, dtype=float)
    y = np.atleast_1d(x).ravel() / math.sqrt(hbar)
    out = np.empty((nmax + 1, y.size))
    log_scale = -y * y / 2 - math.log(math.pi) / 4 - math.log(hbar) / 4
    prev = np.zeros_like(y)
    cur = np.ones_like(y)
    out[0] = np.exp(log_scale)
    for k in range(nmax):
        prev, cur = cur, math.sqrt(2.0 / (k + 1)) * y * cur - math.sqrt(k / (k + 1)) * prev
        big = np.abs(cur) > _RESCALE
        if big.any():
            cur[big] /= _RESCALE
            prev[big] /= _RESCALE
            log_scale[big] += _LOG_RESCALE
        out[k + 1] = _apply_scale(cur, log_scale)
    return out.reshape((nmax + 1,) + x.shape)


def hermite_function(n: int, x, hbar: float = 1.0):
    """Single e_n(x); see :func:`hermite_functions`."""
    if n < 0:
        raise ValueError("index must be nonnegative")
    out = hermite_functions(n, x, hbar)[n]
    return out if np.ndim(out) else float(out)


# ---------------------------------------------------------------------------
# Airy function and its zeros
# ---------------------------------------------------------------------------

_AI0 = 0.355028053887817239260
_AIP0 = 0.258819403792806798405  # -Ai'(0)


def _airy_series(x: float) -> float:
    x3 = x ** 3
    f, g = 1.0, x
    tf, tg = 1.0, x
    for k in range(200):
        tf *= x3 / ((3 * k + 2) * (3 * k + 3))
        tg *= x3 / ((3 * k + 3) * (3 * k + 4))
        f += tf
        g += tg
        if abs(tf) < 1e-18 * max(1.0, abs(f)) and abs(tg) < 1e-18 * max(1.0, abs(g)):
            break
    return _AI0 * f - _AIP0 * g


def _airy_u(kmax: int):
    u = [1.0]
    for k in range(1, kmax + 1):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k))
    return u


_U = _airy_u(40)


def _airy_asymptotic(x: float) -> float:
    z = abs(x)
    zeta = 2.0 / 3.0 * z ** 1.5
    if x > 0:
        s, last = 0.0, math.inf
        for k, uk in enumerate(_U):
            term = (-1) ** k * uk / zeta ** k
            if abs(term) > last:
                break
            s += term
            last = abs(term)
        return math.exp(-zeta) / (2 * math.sqrt(math.pi) * z ** 0.25) * s
    p = q = 0.0
    for k in range(len(_U) // 2):
        tp = (-1) ** k * _U[2 * k] / zeta ** (2 * k)
        tq = (-1) ** k * _U[2 * k + 1] / zeta ** (2 * k + 1)
        if abs(tp) < 1e-17 and abs(tq) < 1e-17:
            break
        p += tp
        q += tq
    return (math.cos(zeta - math.pi / 4) * p + math.sin(zeta - math.pi / 4) * q) / (
        math.sqrt(math.pi) * z ** 0.25
    )


def airy_ai(x):
    """Airy function Ai: Maclaurin series for |x| <= 8, asymptotics beyond."""
    scalar = np.ndim(x) == 0
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.array([_airy_series(v) if abs(v) <= 8.0 else _airy_asymptotic(v) for v in xs])
    return float(out[0]) if scalar else out


def airy_negative_zero(m: int) -> float:
    """m-th zero of Ai on the negative axis; a_1 is the one closest to 0."""
    if m < 1:
        raise ValueError("need m >= 1")
    return _airy_zero_cached(int(m))


_AIRY_ZERO_CACHE: dict[int, float] = {}


def _airy_zero_cached(m: int) -> float:
    if m in _AIRY_ZERO_CACHE:
        return _AIRY_ZERO_CACHE[m]
    t = 3 * math.pi * (4 * m - 1) / 8
    guess = -(t ** (2 / 3)) * (1 + 5 / 48 * t ** -2)
    for width in (0.25, 0.5, 1.0):
        lo, hi = guess - width, min(guess + width, -1e-3)
        if airy_ai(lo) * airy_ai(hi) < 0:
            root = brentq(airy_ai, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=200)
            _AIRY_ZERO_CACHE[m] = root
            return root
    raise ConvergenceError(f"could not bracket Airy zero m={m}")


# ---------------------------------------------------------------------------
# Bessel functions
# ---------------------------------------------------------------------------

def bessel_j0(s):
    return special.j0(s)


def bessel_i0(s):
    return special.i0(s)


def bessel_i0e(s):
    """exp(-|s|) I_0(s), for products that would otherwise overflow."""
    return special.i0e(s)
