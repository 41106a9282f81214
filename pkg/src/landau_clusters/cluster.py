"""Full two-dimensional check: H1 + hbar^2 K in a tensor oscillator basis.

In the rotated coordinates the perturbation is the Weyl quantization of
W(x1, x2, p1, p2) = V((x1 + p2)/sqrt2, (x2 + p1)/sqrt2) and the unperturbed part
acts on the first factor only, with eigenvalues hbar(2k + 1).  The basis is
e_{k1}(x1) e_{k2}(x2); the composite index is k1 * N2 + k2.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import ConvergenceError, ResourceCapError
from .potentials import Potential
from .reduced import ClusterMeasure, reduced_matrix
from .specfun import SemiclassicalPoint
from .weyl import SymbolGrid, wigner_table

DEFAULT_MEMORY_CAP = 2 * 1024 ** 3

PRESETS = {
    "desk": {"n": 6, "N1": 24, "N2": 24, "q": 48, "M": 16},
    "ci": {"n": 3, "N1": 16, "N2": 16, "q": 32, "M": 8},
}


@dataclass(frozen=True)
class RotatedSymbol:
    """W = V o T on four-dimensional phase space."""

    V: Potential

    def __call__(self, x1, x2, p1, p2):
        s = 1.0 / math.sqrt(2.0)
        return self.V((x1 + p2) * s, (x2 + p1) * s)


@dataclass(frozen=True)
class TensorBasisSpec:
    N1: int
    N2: int
    hbar: float

    def __post_init__(self):
        if self.N1 < 1 or self.N2 < 1:
            raise ValueError("basis sizes must be positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    @property
    def dim(self) -> int:
        return self.N1 * self.N2

    def index(self, k1: int, k2: int) -> int:
        return k1 * self.N2 + k2


def memory_estimate(spec: TensorBasisSpec, q: int) -> int:
    """Peak bytes of the factorized assembly (Wigner tables, W, products, result)."""
    g = q * q
    tables = 16 * g * (spec.N1 ** 2 + spec.N2 ** 2)
    w = 8 * g * g
    middle = 16 * spec.N1 ** 2 * g
    result = 16 * 3 * spec.dim ** 2
    return tables + w + middle + result


@dataclass(frozen=True, eq=False)
class FullAssembly:
    spec: TensorBasisSpec
    q: int
    K: np.ndarray
    H: np.ndarray
    asymmetry: float
    metadata: dict = field(default_factory=dict)

    def spectrum(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.H)

    def landau_block(self, n: int, M: Optional[int] = None) -> np.ndarray:
        """<K (e_n x h_l), e_n x h_j> for j, l < M."""
        M = M or self.spec.N2
        if not 0 <= n < self.spec.N1 or M > self.spec.N2:
            raise ValueError("block outside the truncated basis")
        rows = n * self.spec.N2 + np.arange(M)
        return self.K[np.ix_(rows, rows)]


def assemble_full(V: Potential, pt: SemiclassicalPoint, spec: TensorBasisSpec, q: int = 48, *,
                  memory_cap: int = DEFAULT_MEMORY_CAP, tol: float = 1e-8) -> FullAssembly:
    """Matrix of H1 + hbar^2 K by the factorized contraction K = G1 W G2^T.

    G[(k, l), g] holds quadrature-weighted Wigner cross-transforms G(e_l, e_k) at
    the nodes g of a q x q Gauss-Hermite phase grid, one table per factor.
    """
    if abs(spec.hbar - pt.hbar) > 1e-15 * pt.hbar:
        raise ValueError("basis hbar does not match the semiclassical point")
    if pt.n >= spec.N1:
        raise ValueError("Landau index must lie inside the first-factor truncation")
    need = memory_estimate(spec, q)
    if need > memory_cap:
        raise ResourceCapError(f"assembly needs ~{need / 2**20:.0f} MiB, cap is {memory_cap / 2**20:.0f} MiB")
    h = pt.hbar
    grid = SymbolGrid.build(h, q)

    def table(N):
        T = wigner_table(N - 1, grid.x, grid.p, h)
        # rows (k, l) pair with G(e_l, e_k)
        return (T.transpose(1, 0, 2) * grid.weights).reshape(N * N, grid.size)

    G1 = table(spec.N1)
    G2 = G1 if spec.N2 == spec.N1 else table(spec.N2)
    W = RotatedSymbol(V)(grid.x[:, None], grid.x[None, :], grid.p[:, None], grid.p[None, :])
    K4 = (G1 @ W) @ G2.T
    K = (K4.reshape(spec.N1, spec.N1, spec.N2, spec.N2)
         .transpose(0, 2, 1, 3).reshape(spec.dim, spec.dim))
    asym = float(np.max(np.abs(K - K.conj().T), initial=0.0))
    if asym > tol * max(1.0, float(np.max(np.abs(K), initial=0.0))):
        raise ConvergenceError(f"assembled K not Hermitian (gap {asym:.3g})")
    K = 0.5 * (K + K.conj().T)
    levels = np.repeat(h * (2 * np.arange(spec.N1) + 1.0), spec.N2)
    H = np.diag(levels).astype(complex) + h * h * K
    meta = {"E": pt.E, "n": pt.n, "hbar": h, "N1": spec.N1, "N2": spec.N2, "q": q,
            "memory_estimate": need}
    return FullAssembly(spec, q, K, H, asym, meta)


def extract_cluster(spectrum, pt: SemiclassicalPoint) -> ClusterMeasure:
    """Eigenvalues with |lambda - E| < hbar, returned as (lambda - E) / hbar^2."""
    lam = np.sort(np.asarray(spectrum, dtype=float))
    h = pt.hbar
    inside = np.abs(lam - pt.E) < h
    if not inside.any():
        raise ConvergenceError("no eigenvalues in the cluster window; enlarge the basis")
    return ClusterMeasure((lam[inside] - pt.E) / (h * h), "full-2D",
                          {"E": pt.E, "n": pt.n, "hbar": h, "window": h})


@dataclass(frozen=True)
class TwoRouteReport:
    max_entry_gap: float
    top_eigen_gaps: np.ndarray
    block: np.ndarray
    reduced: np.ndarray
    tolerance: float

    @property
    def max_top_gap(self) -> float:
        return float(np.max(self.top_eigen_gaps, initial=0.0))

    @property
    def ok(self) -> bool:
        return self.max_entry_gap <= self.tolerance


def top_eigen_gaps(A: np.ndarray, B: np.ndarray, count: int = 10) -> np.ndarray:
    """Relative gaps between the ``count`` largest eigenvalues of two Hermitian matrices."""
    a = np.sort(np.linalg.eigvalsh(A))[::-1][:count]
    b = np.sort(np.linalg.eigvalsh(B))[::-1][:count]
    return np.abs(a - b) / np.maximum(np.abs(b), 1e-300)


def two_route_check(V: Potential, pt: SemiclassicalPoint, spec: TensorBasisSpec, M: int,
                    q: int = 48, *, assembly: Optional[FullAssembly] = None,
                    tolerance: float = 1e-3) -> TwoRouteReport:
    """Compare the e_n block of the assembled K with the reduced matrix of T_n."""
    if M > spec.N2:
        raise ValueError("M must not exceed N2")
    full = assembly or assemble_full(V, pt, spec, q)
    block = full.landau_block(pt.n, M)
    red = reduced_matrix(V, pt, M)
    gap = float(np.max(np.abs(block - red), initial=0.0))
    return TwoRouteReport(gap, top_eigen_gaps(block, red, min(10, M)), block, red, tolerance)
