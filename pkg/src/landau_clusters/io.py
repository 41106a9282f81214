"""Deterministic result files.

A data file holds only the parameters and the table, so identical configs give
identical bytes.  Run metadata that changes between runs (wall time, library
versions) goes to a sidecar ``<out>.meta.json``.
"""
from __future__ import annotations

import csv
import io
import json
import platform
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
import scipy


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating,)):
        return float(v)
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, np.ndarray):
        return [_jsonable(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    return v


def render_csv(params: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    for key in sorted(params):
        buf.write(f"# {key}={json.dumps(_jsonable(params[key]), sort_keys=True)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def render_json(params: dict, columns: Sequence[str], rows: Iterable[Sequence]) -> str:
    doc = {"parameters": _jsonable(params), "columns": list(columns),
           "rows": [[_jsonable(v) for v in row] for row in rows]}
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def write_result(out, params: dict, columns, rows, *, fmt: str = "csv",
                 meta: dict | None = None) -> str:
    """Render a table and write it to ``out`` (a path, or None for the text only)."""
    rows = list(rows)
    text = render_json(params, columns, rows) if fmt == "json" else render_csv(params, columns, rows)
    if out is not None:
        path = Path(out)
        path.write_text(text)
        if meta is not None:
            Path(str(path) + ".meta.json").write_text(json.dumps(_jsonable(meta), sort_keys=True, indent=1) + "\n")
    return text


def versions() -> dict:
    from . import __version__
    return {"landau_clusters": __version__, "numpy": np.__version__,
            "scipy": scipy.__version__, "python": platform.python_version()}
