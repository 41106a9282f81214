"""Command-line experiments; one subcommand writes one table.

Exit codes: 0 success, 2 configuration error, 3 numerical non-convergence,
4 resource cap exceeded.  ``LANDAU_WORKERS`` sets the worker count for
subcommands that run independent n values.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from . import cluster, inverse, potentials, radon, reduced, specfun
from .errors import ConvergenceError, ResourceCapError
from .io import versions, write_result

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_RESOURCE = 0, 2, 3, 4
WORKERS_ENV = "LANDAU_WORKERS"

# ci caps every size so that the whole CLI test suite runs in seconds
CI_CAPS = {"n": 32, "basis": 32, "points": 500, "N": 16, "q": 32, "grid": 64}


class ConfigError(ValueError):
    """Bad or inconsistent command-line configuration."""


@dataclass
class ExperimentConfig:
    command: str
    potential: Optional[str] = None
    energy: float = 3.0
    n: Optional[int] = None
    n_list: Optional[list] = None
    basis: Optional[int] = None
    orders: dict = field(default_factory=dict)
    out: Optional[str] = None
    fmt: str = "csv"
    seed: int = 0
    preset: str = "desk"
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.energy > 0:
            raise ConfigError("energy must be positive")
        if self.potential and not self.potential.lstrip().startswith("{"):
            if not Path(self.potential).is_file():
                raise ConfigError(f"potential file {self.potential!r} not found")
        if self.fmt not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if self.preset not in cluster.PRESETS:
            raise ConfigError(f"preset must be one of {sorted(cluster.PRESETS)}")

    def load_potential(self) -> potentials.Potential:
        if self.potential is None:
            return potentials.make_gaussian(potentials.GaussianSpec())
        text = self.potential if self.potential.lstrip().startswith("{") else Path(self.potential).read_text()
        try:
            return potentials.from_json(text)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"invalid potential specification: {exc}") from exc

    def params(self) -> dict:
        """Everything that determines the output (hbar is derived, never set)."""
        d = {k: v for k, v in asdict(self).items() if k not in ("out", "extra", "orders")}
        d.update(self.orders)
        d.update(self.extra)
        if self.potential is not None:
            d["potential"] = json.loads(self.load_potential().to_json())
        if self.n is not None:
            d["hbar"] = self.energy / (2 * self.n + 1)
        return {k: v for k, v in d.items() if v is not None}


# ---------------------------------------------------------------------------
# helpers
# ---------------------------------------------------------------------------

def _int_list(text: str) -> list:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"not a list of integers: {text!r}") from exc


def _float_list(text: str) -> list:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError as exc:
        raise ConfigError(f"not a list of numbers: {text!r}") from exc


def _span(text: str):
    """'min:max:count' -> linspace."""
    try:
        lo, hi, count = text.split(":")
        return np.linspace(float(lo), float(hi), int(count))
    except ValueError as exc:
        raise ConfigError(f"expected min:max:count, got {text!r}") from exc


def _cap(cfg: ExperimentConfig, key: str, value):
    if cfg.preset == "ci" and value is not None:
        return min(value, CI_CAPS[key])
    return value


def workers() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError as exc:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc


def _ordered_map(fn, items):
    """Map preserving input order; threads only when more than one worker is asked for."""
    k = workers()
    if k == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=k) as pool:
        return list(pool.map(fn, items))


def _rho_from_text(text: str, sup: float):
    """poly:k -> t^k bump(t / (1.5 sup|V|)); monomial:k -> t^k."""
    try:
        kind, k = text.split(":")
        k = int(k)
    except ValueError as exc:
        raise ConfigError(f"test function must look like poly:k, got {text!r}") from exc
    if kind == "poly":
        return reduced.poly_bump(k, 1.5 * sup if sup > 0 else 1.0)
    if kind == "monomial":
        return reduced.monomial(k)
    raise ConfigError(f"unknown test function family {kind!r}")


# ---------------------------------------------------------------------------
# experiments: each returns (columns, rows, extra params)
# ---------------------------------------------------------------------------

def _radon(cfg, a):
    V = cfg.load_potential()
    if a.r_list:
        r = np.asarray(_float_list(a.r_list))
        I = radon.spectral_invariant_I(V, r, verify=a.verify)
        return ["r", "I"], list(zip(r, np.atleast_1d(I))), {}
    xs = _span(a.grid)
    xs = xs[: _cap(cfg, "grid", xs.size)]
    X2, P2 = np.meshgrid(xs, xs, indexing="ij")
    vals = radon.circle_average(V, (X2.ravel(), P2.ravel()), cfg.energy)
    return ["x2", "p2", "E", "Vtilde"], [(x, p, cfg.energy, v) for x, p, v in zip(X2.ravel(), P2.ravel(), vals)], {}


def _symbol(cfg, a):
    V = cfg.load_potential()
    pt = specfun.SemiclassicalPoint(cfg.energy, cfg.n)
    pts = [tuple(_float_list(p)) for p in a.xi.split(";")]
    if any(len(p) != 2 for p in pts):
        raise ConfigError("--xi expects 'x2,p2;x2,p2;...'")
    x2 = np.array([p[0] for p in pts])
    p2 = np.array([p[1] for p in pts])
    phi = np.atleast_1d(reduced.reduced_symbol(V, (x2, p2), pt))
    vt = np.atleast_1d(radon.circle_average(V, (x2, p2), cfg.energy))
    return ["x2", "p2", "phi", "Vtilde", "residual"], [r + (r[2] - r[3],) for r in zip(x2, p2, phi, vt)], {}


def _reduced_spectrum(cfg, a):
    V = cfg.load_potential()
    pt = specfun.SemiclassicalPoint(cfg.energy, cfg.n)
    spec = reduced.reduced_spectrum(V, pt, cfg.basis, method=a.method)
    return ["k", "eigenvalue"], list(enumerate(spec.eigenvalues)), {"route": spec.metadata["route"]}


def _szego(cfg, a):
    V = cfg.load_potential()
    rho = _rho_from_text(a.rho, V.sup_norm)
    rule = (lambda pt: cfg.basis) if cfg.basis else None
    rows = _ordered_map(lambda n: reduced.szego_check(V, cfg.energy, rho, [n], rule)[0], cfg.n_list)
    return (["n", "hbar", "basis", "trace_side", "integral_side", "gap"],
            [(r.n, r.hbar, r.basis_size, r.trace_side, r.integral_side, r.gap) for r in rows], {"rho": a.rho})


def _cluster_spectrum(cfg, a):
    V = cfg.load_potential()
    pt = specfun.SemiclassicalPoint(cfg.energy, cfg.n)
    spec = cluster.TensorBasisSpec(cfg.orders["N1"], cfg.orders["N2"], pt.hbar)
    full = cluster.assemble_full(V, pt, spec, cfg.orders["q"], memory_cap=a.memory_cap_mb * 2 ** 20)
    lam = np.sort(full.spectrum())
    inside = np.abs(lam - pt.E) < pt.hbar
    scaled = (lam - pt.E) / pt.hbar ** 2
    return ["k", "eigenvalue", "scaled", "in_cluster"], list(zip(range(lam.size), lam, scaled, inside)), {}


def _two_route(cfg, a):
    V = cfg.load_potential()
    pt = specfun.SemiclassicalPoint(cfg.energy, cfg.n)
    spec = cluster.TensorBasisSpec(cfg.orders["N1"], cfg.orders["N2"], pt.hbar)
    full = cluster.assemble_full(V, pt, spec, cfg.orders["q"], memory_cap=a.memory_cap_mb * 2 ** 20)
    rep = cluster.two_route_check(V, pt, spec, cfg.basis, cfg.orders["q"], assembly=full)
    a_eig = np.sort(np.linalg.eigvalsh(rep.block))[::-1]
    b_eig = np.sort(np.linalg.eigvalsh(rep.reduced))[::-1]
    rows = [(j, x, y, abs(x - y)) for j, (x, y) in enumerate(zip(a_eig, b_eig))]
    extra = {"max_entry_gap": rep.max_entry_gap}
    if not rep.ok:
        raise ConvergenceError(f"two routes disagree by {rep.max_entry_gap:.3g}", rows)
    return ["j", "block_eigenvalue", "reduced_eigenvalue", "gap"], rows, extra


def _inverse(cfg, a):
    V = cfg.load_potential()
    try:
        r_grid = inverse.LogGrid.parse(a.r_grid)
        w_grid = inverse.LogGrid.parse(a.w_grid)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    r = r_grid.nodes
    I = radon.spectral_invariant_I(V, r)
    lam = a.lam if a.lam == "auto" else float(a.lam)
    res = inverse.mellin_deconvolve(I, r, w_grid, lam, noise=a.noise)
    truth = inverse.ring_profile(V, w_grid) if V.has_fourier else None
    rows = [(s, truth.values[i] if truth else "", res.profile.values[i])
            for i, s in enumerate(w_grid.nodes)]
    extra = {"lambda_chosen": res.lam, "residual": res.residual, "clipped_fraction": res.clipped_fraction,
             "condition": res.condition}
    return ["sigma", "W_true", "W_recovered"], rows, extra


def _sobolev(cfg, a):
    V = cfg.load_potential()
    rows = []
    for s in _float_list(a.s):
        sq = inverse.sobolev_norm_sq(V, s, a.convention)
        rows.append((s, sq, math.sqrt(sq)))
    return ["s", "norm_sq", "norm"], rows, {"convention": a.convention}


def _laguerre_zeros(cfg, a):
    zs = specfun.laguerre_zeros(cfg.n)
    return ["k", "zero"], [(k + 1, z) for k, z in enumerate(zs.zeros)], {"nu": zs.nu}


def _psi_figure(cfg, a):
    pt = specfun.SemiclassicalPoint(cfg.energy, cfg.n)
    count = _cap(cfg, "points", a.points)
    u = np.linspace(0.0, a.u_max, count)
    return ["u", "psi"], list(zip(u, specfun.psi_eval(pt, u))), {"u_max": a.u_max, "points": count}


COMMANDS = {
    "radon": _radon, "symbol": _symbol, "reduced-spectrum": _reduced_spectrum,
    "szego-check": _szego, "cluster-spectrum": _cluster_spectrum, "two-route": _two_route,
    "inverse": _inverse, "sobolev": _sobolev, "laguerre-zeros": _laguerre_zeros,
    "psi-figure": _psi_figure,
}


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="landau-clusters", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--potential", help="JSON file (or inline JSON) describing V; default unit Gaussian")
    common.add_argument("--energy", type=float, default=3.0)
    common.add_argument("--out", help="output path; stdout when omitted")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default="csv")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--preset", choices=sorted(cluster.PRESETS), default="desk")
    common.add_argument("--memory-cap-mb", type=int, default=2048)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("radon", parents=[common], help="averaged potential on a xi grid, or I(r)")
    p.add_argument("--grid", default="-4:4:41", help="x2 and p2 range as min:max:count")
    p.add_argument("--r-list", help="comma-separated radii; emits I(r) instead")
    p.add_argument("--verify", action="store_true", help="cross-check I(r) by the space-side route")

    p = sub.add_parser("symbol", parents=[common], help="reduced symbol Phi(xi, n)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--xi", default="0,0;1,0;0,1.5")

    p = sub.add_parser("reduced-spectrum", parents=[common], help="eigenvalues of T_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--basis", type=int, default=64)
    p.add_argument("--method", choices=("auto", "radial", "grid"), default="auto")

    p = sub.add_parser("szego-check", parents=[common], help="trace against phase-space integral")
    p.add_argument("--rho", default="poly:2")
    p.add_argument("--n-list", default="16,32,64")
    p.add_argument("--basis", type=int, help="fixed basis size; default covers the support")

    for name, help_text in (("cluster-spectrum", "full 2D spectrum near E"),
                            ("two-route", "Landau block of K against the reduced matrix")):
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.add_argument("--n", type=int)
        p.add_argument("--N1", type=int)
        p.add_argument("--N2", type=int)
        p.add_argument("--q", type=int)
        if name == "two-route":
            p.add_argument("--M", type=int)

    p = sub.add_parser("inverse", parents=[common], help="recover the ring profile from I(r)")
    p.add_argument("--r-grid", default="log:0.1:10:64")
    p.add_argument("--w-grid", default="log:0.05:1e6:341")
    p.add_argument("--lambda", dest="lam", default="auto")
    p.add_argument("--noise", type=float, default=1e-6)

    p = sub.add_parser("sobolev", parents=[common], help="Sobolev norms of V")
    p.add_argument("--s", default="-2,-1,0,1,2")
    p.add_argument("--convention", choices=sorted(inverse.CONVENTIONS), default="half")

    p = sub.add_parser("laguerre-zeros", parents=[common], help="zeros of L_n")
    p.add_argument("--n", type=int, required=True)

    p = sub.add_parser("psi-figure", parents=[common], help="psi_n on [0, u_max]")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--u-max", type=float, default=5.0)
    p.add_argument("--points", type=int, default=2000)
    return parser


def config_from_args(a) -> ExperimentConfig:
    cfg = ExperimentConfig(command=a.command, potential=a.potential, energy=a.energy, out=a.out,
                           fmt=a.fmt, seed=a.seed, preset=a.preset)
    preset = cluster.PRESETS[cfg.preset]
    if a.command in ("cluster-spectrum", "two-route"):
        cfg.n = a.n if a.n is not None else preset["n"]
        cfg.orders = {k: getattr(a, k) if getattr(a, k) is not None else preset[k] for k in ("N1", "N2", "q")}
        if cfg.preset == "ci":
            cfg.orders = {"N1": _cap(cfg, "N", cfg.orders["N1"]), "N2": _cap(cfg, "N", cfg.orders["N2"]),
                          "q": _cap(cfg, "q", cfg.orders["q"])}
        if a.command == "two-route":
            cfg.basis = a.M if a.M is not None else preset["M"]
            if cfg.basis > cfg.orders["N2"]:
                raise ConfigError("M must not exceed N2")
        if cfg.n >= cfg.orders["N1"]:
            raise ConfigError("n must be smaller than N1")
    elif hasattr(a, "n"):
        cfg.n = _cap(cfg, "n", a.n)
    if hasattr(a, "n_list"):
        cfg.n_list = [_cap(cfg, "n", n) for n in _int_list(a.n_list)]
        if not cfg.n_list:
            raise ConfigError("--n-list is empty")
    if a.command in ("reduced-spectrum", "szego-check") and a.basis is not None:
        cfg.basis = _cap(cfg, "basis", a.basis)
    if cfg.n is not None and cfg.n < 0:
        raise ConfigError("n must be nonnegative")
    if a.command == "laguerre-zeros" and cfg.n < 1:
        raise ConfigError("laguerre-zeros needs n >= 1")
    if cfg.basis is not None and cfg.basis < 1:
        raise ConfigError("basis size must be positive")
    skip = {"command", "potential", "energy", "out", "fmt", "seed", "preset", "n", "n_list", "basis",
            "N1", "N2", "q", "M", "memory_cap_mb"}
    cfg.extra = {k: v for k, v in vars(a).items() if k not in skip and v is not None}
    return cfg


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        a = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    start = time.perf_counter()
    try:
        cfg = config_from_args(a)
        columns, rows, extra = COMMANDS[a.command](cfg, a)
        params = cfg.params()
        params.update(extra)
        meta = {"wall_time_s": time.perf_counter() - start, "versions": versions(),
                "workers": workers(), "command": a.command}
        text = write_result(cfg.out, params, columns, rows, fmt=cfg.fmt, meta=meta)
        if cfg.out is None:
            stdout.write(text)
        return EXIT_OK
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ResourceCapError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except ConvergenceError as exc:
        print(f"numerical non-convergence: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
