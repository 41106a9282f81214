"""Test potentials on the plane: Gaussian mixtures with closed-form oracles.

Fourier convention: ``Vhat(k) = \\int V(x) exp(-i x.k) dx``; the inverse carries
``(2 pi)^-2``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from .errors import ConvergenceError
from .quadrature import scaled_hermite_rule, trapezoid_circle
from .specfun import bessel_i0e


@dataclass(frozen=True)
class GaussianSpec:
    """amplitude * exp(-inverse_width * |x - center|^2)."""

    center: tuple = (0.0, 0.0)
    inverse_width: float = 1.0
    amplitude: float = 1.0

    def __post_init__(self):
        if not self.inverse_width > 0:
            raise ValueError(f"inverse_width must be positive, got {self.inverse_width}")
        cx, cy = self.center
        object.__setattr__(self, "center", (float(cx), float(cy)))
        object.__setattr__(self, "inverse_width", float(self.inverse_width))
        object.__setattr__(self, "amplitude", float(self.amplitude))


@dataclass(frozen=True, eq=False)
class Potential:
    """A real potential on the plane plus whatever closed forms are known.

    All callables take coordinate arrays and broadcast.  ``spec`` is the JSON
    document the potential was built from (None for wrapped callables).
    """

    evaluator: Callable
    fourier_evaluator: Optional[Callable] = None
    circle_average_oracle: Optional[Callable] = None
    decay_tag: str = "schwartz"
    spec: Optional[dict] = None
    # (smallest, largest) inverse width; sizes quadratures
    widths: tuple = (1.0, 1.0)
    centers: tuple = ((0.0, 0.0),)
    sup_norm: float = 1.0
    _fft_nodes: list = field(default_factory=list, repr=False, compare=False)

    def __call__(self, x, y):
        return self.evaluator(np.asarray(x, dtype=float), np.asarray(y, dtype=float))

    @property
    def has_fourier(self) -> bool:
        return self.fourier_evaluator is not None

    @property
    def is_radial(self) -> bool:
        """True when V depends only on |x| (every Gaussian centred at 0)."""
        if self.spec is None:
            return False
        return all(c == (0.0, 0.0) for c in _gaussian_centers(self.spec))

    def to_json(self) -> str:
        if self.spec is None:
            raise ValueError("potential was built from a bare callable; nothing to serialize")
        return json.dumps(self.spec, sort_keys=True)


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def make_gaussian(spec: GaussianSpec) -> Potential:
    (cx, cy), w, a = spec.center, spec.inverse_width, spec.amplitude

    def evaluate(x, y):
        return a * np.exp(-w * ((x - cx) ** 2 + (y - cy) ** 2))

    def fourier(kx, ky):
        k2 = kx ** 2 + ky ** 2
        return a * math.pi / w * np.exp(-k2 / (4 * w)) * np.exp(-1j * (cx * kx + cy * ky))

    def circle_average(x0, y0, r):
        d = np.hypot(x0 - cx, y0 - cy)
        # exp(-w(d^2 + r^2)) I0(2wdr) written with the scaled I0
        return a * np.exp(-w * (d - r) ** 2) * bessel_i0e(2 * w * d * r)

    doc = {"type": "gaussian", "center": [cx, cy], "inverse_width": w, "amplitude": a}
    return Potential(evaluate, fourier, circle_average, "schwartz", doc,
                     widths=(w, w), centers=((cx, cy),), sup_norm=abs(a))


def make_constant(value: float) -> Potential:
    """V == value.  Not Schwartz; used for identity checks only."""
    c = float(value)

    def evaluate(x, y):
        return np.full(np.broadcast(x, y).shape, c)

    def circle_average(x0, y0, r):
        return np.full(np.broadcast(x0, y0, r).shape, c)

    fourier = None
    if c == 0.0:
        def fourier(kx, ky):
            return np.zeros(np.broadcast(kx, ky).shape, dtype=complex)

    return Potential(evaluate, fourier, circle_average, "constant",
                     {"type": "constant", "value": c}, sup_norm=abs(c))


def make_mixture(components) -> Potential:
    """Pointwise sum of Gaussians (GaussianSpec) and/or Potentials."""
    parts = [make_gaussian(c) if isinstance(c, GaussianSpec) else c for c in components]
    if not parts:
        raise ValueError("mixture needs at least one component")

    def evaluate(x, y):
        return sum(p.evaluator(x, y) for p in parts)

    fourier = None
    if all(p.fourier_evaluator is not None for p in parts):
        def fourier(kx, ky):
            return sum(p.fourier_evaluator(kx, ky) for p in parts)

    average = None
    if all(p.circle_average_oracle is not None for p in parts):
        def average(x0, y0, r):
            return sum(p.circle_average_oracle(x0, y0, r) for p in parts)

    docs = [p.spec for p in parts]
    doc = {"type": "mixture", "components": docs} if all(d is not None for d in docs) else None
    tags = {p.decay_tag for p in parts}
    gauss = [p for p in parts if p.decay_tag != "constant"] or parts
    widths = (min(p.widths[0] for p in gauss), max(p.widths[1] for p in gauss))
    centers = tuple(c for p in gauss for c in p.centers)
    return Potential(evaluate, fourier, average,
                     "schwartz" if tags == {"schwartz"} else "mixed", doc,
                     widths=widths, centers=centers,
                     sup_norm=sum(p.sup_norm for p in parts))


def from_function(func: Callable, inverse_width: float = 1.0, sup_norm: float = 1.0,
                  center=(0.0, 0.0)) -> Potential:
    """Wrap a vectorized callable V(x, y); no closed-form oracles."""
    w = float(inverse_width)
    return Potential(lambda x, y: np.asarray(func(x, y), dtype=float), None, None,
                     "schwartz", None, widths=(w, w), centers=(tuple(map(float, center)),),
                     sup_norm=sup_norm)


def zero_potential() -> Potential:
    return make_constant(0.0)


def from_dict(doc: dict) -> Potential:
    kind = doc.get("type")
    if kind == "gaussian":
        return make_gaussian(GaussianSpec(tuple(doc.get("center", (0.0, 0.0))),
                                          doc.get("inverse_width", 1.0),
                                          doc.get("amplitude", 1.0)))
    if kind == "constant":
        return make_constant(doc.get("value", 0.0))
    if kind == "mixture":
        return make_mixture([from_dict(c) for c in doc.get("components", [])])
    raise ValueError(f"unknown potential type {kind!r}")


def from_json(text: str) -> Potential:
    return from_dict(json.loads(text))


def load(path) -> Potential:
    return from_json(Path(path).read_text())


def _gaussian_centers(doc):
    if doc["type"] == "gaussian":
        yield tuple(float(c) for c in doc["center"])
    elif doc["type"] == "mixture":
        for c in doc["components"]:
            yield from _gaussian_centers(c)


# ---------------------------------------------------------------------------
# rigid motions and scaling (rebuilt from the JSON document so oracles survive)
# ---------------------------------------------------------------------------

def _map_doc(doc, center_map, amp=1.0):
    kind = doc["type"]
    if kind == "gaussian":
        out = dict(doc)
        out["center"] = list(center_map(*doc["center"]))
        out["amplitude"] = doc.get("amplitude", 1.0) * amp
        return out
    if kind == "constant":
        return {"type": "constant", "value": doc["value"] * amp}
    return {"type": "mixture", "components": [_map_doc(c, center_map, amp) for c in doc["components"]]}


def _transformed(V: Potential, center_map, point_map, amp=1.0) -> Potential:
    if V.spec is not None:
        return from_dict(_map_doc(V.spec, center_map, amp))
    f = V.evaluator
    return Potential(lambda x, y: amp * f(*point_map(x, y)), decay_tag=V.decay_tag,
                     widths=V.widths, centers=tuple(center_map(*c) for c in V.centers),
                     sup_norm=abs(amp) * V.sup_norm)


def rotate(V: Potential, angle: float) -> Potential:
    """x -> V(R(-angle) x): the graph of V turned by ``angle`` about the origin."""
    c, s = math.cos(angle), math.sin(angle)
    return _transformed(V, lambda x, y: (c * x - s * y, s * x + c * y),
                        lambda x, y: (c * x + s * y, -s * x + c * y))


def translate(V: Potential, shift) -> Potential:
    """x -> V(x - shift)."""
    a, b = float(shift[0]), float(shift[1])
    return _transformed(V, lambda x, y: (x + a, y + b), lambda x, y: (x - a, y - b))


def scale(V: Potential, factor: float) -> Potential:
    return _transformed(V, lambda x, y: (x, y), lambda x, y: (x, y), amp=float(factor))


# ---------------------------------------------------------------------------
# Fourier transform and circle averages
# ---------------------------------------------------------------------------

def fourier_transform(V: Potential, kx, ky, *, tol: float = 1e-10, max_order: int = 256):
    """Vhat(kx, ky), closed form when available, else tensor Gauss-Hermite."""
    if V.fourier_evaluator is not None:
        return V.fourier_evaluator(np.asarray(kx, dtype=float), np.asarray(ky, dtype=float))
    return _fourier_quadrature(V, kx, ky, tol=tol, max_order=max_order)


def _fourier_quadrature(V, kx, ky, tol, max_order):
    kx, ky = np.broadcast_arrays(np.asarray(kx, float), np.asarray(ky, float))
    length = 1.0 / math.sqrt(V.widths[0])
    cx, cy = np.mean(np.asarray(V.centers, dtype=float), axis=0)
    previous, order = None, 32
    while order <= max_order:
        xs, wx = scaled_hermite_rule(order, length, cx)
        ys, wy = scaled_hermite_rule(order, length, cy)
        X, Y = np.meshgrid(xs, ys, indexing="ij")
        weights = (wx[:, None] * wy[None, :]) * V(X, Y)
        phase_x = np.exp(-1j * np.multiply.outer(kx.ravel(), xs))
        phase_y = np.exp(-1j * np.multiply.outer(ky.ravel(), ys))
        value = np.einsum("ki,ij,kj->k", phase_x, weights, phase_y).reshape(kx.shape)
        if previous is not None:
            gap = np.max(np.abs(value - previous), initial=0.0)
            if gap <= tol * max(1.0, V.sup_norm / V.widths[0]):
                V._fft_nodes.append(order)
                return value
        previous, order = value, 2 * order
    raise ConvergenceError("Fourier quadrature did not converge", (previous, value))


def angular_average(V: Potential, x0, y0, r, count: int = 256):
    """Trapezoid average of V over circles of radius r centred at (x0, y0)."""
    x0, y0, r = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (x0, y0, r)))
    theta, w = trapezoid_circle(count)
    ct, st = np.cos(theta), np.sin(theta)
    vals = V(x0[..., None] + r[..., None] * ct, y0[..., None] + r[..., None] * st)
    return vals @ w
