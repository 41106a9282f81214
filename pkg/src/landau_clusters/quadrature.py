"""Gauss rules from Jacobi matrices (Golub-Welsch)."""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .specfun import _apply_scale, _polish_laguerre_nodes, _scaled_laguerre, hermite_functions

KINDS = ("gauss-laguerre", "gauss-hermite", "gauss-legendre")


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes and weights of an ``order``-point Gauss rule.

    ``weights`` integrate against the rule's weight function (exp(-u) on
    [0, inf), exp(-x^2) on the line, 1 on [-1, 1]).  ``scaled_weights`` are the
    weights multiplied back by the inverse weight function at each node, so that
    ``sum(scaled_weights * f(nodes))`` approximates the plain integral of f.
    For high Laguerre orders the plain weights underflow; the scaled ones don't.
    """

    kind: str
    order: int
    nodes: np.ndarray
    weights: np.ndarray
    scaled_weights: np.ndarray

    def integrate(self, values) -> float:
        """Weighted sum against the rule's weight function."""
        return float(np.dot(self.weights, values))

    def to_csv(self) -> str:
        lines = ["node,weight"]
        lines += [f"{x:.17g},{w:.17g}" for x, w in zip(self.nodes, self.weights)]
        return "\n".join(lines) + "\n"


def gauss_rule(kind: str, order: int) -> QuadratureRule:
    if kind not in KINDS:
        raise ValueError(f"unsupported quadrature kind {kind!r}; choose from {KINDS}")
    if int(order) != order or order < 1:
        raise ValueError("order must be a positive integer")
    return _gauss_rule(kind, int(order))


@lru_cache(maxsize=64)
def _gauss_rule(kind: str, m: int) -> QuadratureRule:
    if kind == "gauss-legendre":
        k = np.arange(1, m, dtype=float)
        off = k / np.sqrt(4 * k * k - 1)
        x, v = eigh_tridiagonal(np.zeros(m), off)
        w = 2.0 * v[0] ** 2
        order = np.argsort(x)
        x, w = x[order], w[order]
        return _freeze(QuadratureRule(kind, m, x, w, w.copy()))

    if kind == "gauss-hermite":
        off = np.sqrt(np.arange(1, m, dtype=float) / 2)
        x = np.sort(eigh_tridiagonal(np.zeros(m), off, eigvals_only=True))
        # Christoffel form: w_i exp(x_i^2) = 1 / (m phi_{m-1}(x_i)^2)
        phi = hermite_functions(m - 1, x)[m - 1]
        scaled = 1.0 / (m * phi * phi)
        w = scaled * np.exp(-x * x)
        return _freeze(QuadratureRule(kind, m, x, w, scaled))

    d = 2.0 * np.arange(m) + 1.0
    off = np.arange(1, m, dtype=float)
    x = np.sort(eigh_tridiagonal(d, off, eigvals_only=True))
    x = np.sort(_polish_laguerre_nodes(m, x))
    # w_i exp(x_i) = x_i / ((m+1)^2 l_{m+1}(x_i)^2), l_k = exp(-x/2) L_k
    mant, _, log_scale = _scaled_laguerre(m + 1, x.copy())
    ell = _apply_scale(mant, log_scale - x / 2)
    scaled = x / ((m + 1) ** 2 * ell * ell)
    w = scaled * np.exp(-x)
    return _freeze(QuadratureRule(kind, m, x, w, scaled))


def _freeze(rule: QuadratureRule) -> QuadratureRule:
    for arr in (rule.nodes, rule.weights, rule.scaled_weights):
        arr.setflags(write=False)
    return rule


def scaled_hermite_rule(order: int, scale: float, center: float = 0.0):
    """Nodes center + scale*z and weights for plain integrals over the line."""
    rule = gauss_rule("gauss-hermite", order)
    return center + scale * rule.nodes, scale * rule.scaled_weights


def legendre_on(a: float, b: float, order: int):
    """Gauss-Legendre nodes/weights mapped to [a, b]."""
    rule = gauss_rule("gauss-legendre", order)
    half = 0.5 * (b - a)
    return a + half * (rule.nodes + 1.0), half * rule.weights


def trapezoid_circle(count: int):
    """Equispaced angles on [0, 2 pi) with weights summing to one."""
    theta = 2 * math.pi * np.arange(count) / count
    return theta, np.full(count, 1.0 / count)
