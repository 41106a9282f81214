import io
import json
import subprocess
import sys

import numpy as np
import pytest

from landau_clusters.cli import EXIT_CONFIG, EXIT_NUMERIC, EXIT_OK, EXIT_RESOURCE, run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def table(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    header = lines[0].split(",")
    return header, [l.split(",") for l in lines[1:]]


@pytest.mark.parametrize("argv", [
    ["radon", "--grid=-2:2:5"],
    ["radon", "--r-list", "0.5,1,2", "--verify"],
    ["symbol", "--n", "16"],
    ["reduced-spectrum", "--n", "10", "--basis", "16"],
    ["reduced-spectrum", "--n", "10", "--basis", "12", "--method", "grid"],
    ["szego-check", "--n-list", "8,16"],
    ["cluster-spectrum"],
    ["two-route"],
    ["inverse", "--r-grid", "log:0.1:10:32"],
    ["sobolev", "--s", "0,1"],
    ["laguerre-zeros", "--n", "20"],
    ["psi-figure", "--n", "30", "--points", "200"],
])
def test_every_subcommand_is_deterministic(argv, tmp_path):
    argv = argv + ["--preset", "ci"]
    code, first = call(*argv)
    assert code == EXIT_OK, first
    assert call(*argv)[1] == first
    out = tmp_path / "r.csv"
    assert call(*argv, "--out", str(out))[0] == EXIT_OK
    assert out.read_text() == first
    meta = json.loads((tmp_path / "r.csv.meta.json").read_text())
    assert meta["command"] == argv[0] and "numpy" in meta["versions"]


def test_header_records_parameters():
    code, text = call("symbol", "--n", "16", "--energy", "2.5")
    assert code == EXIT_OK
    params = dict(l[2:].split("=", 1) for l in text.splitlines() if l.startswith("# "))
    assert json.loads(params["hbar"]) == pytest.approx(2.5 / 33)
    assert json.loads(params["energy"]) == 2.5
    header, rows = table(text)
    assert header == ["x2", "p2", "phi", "Vtilde", "residual"] and len(rows) == 3
    assert all(abs(float(r[4])) < 1e-3 for r in rows)


def test_json_output_and_inline_potential():
    pot = json.dumps({"type": "gaussian", "center": [0.3, 0.0], "inverse_width": 2.0, "amplitude": 1.0})
    code, text = call("laguerre-zeros", "--n", "5", "--format", "json", "--potential", pot)
    assert code == EXIT_OK
    doc = json.loads(text)
    assert doc["columns"] == ["k", "zero"] and len(doc["rows"]) == 5
    assert doc["parameters"]["potential"]["inverse_width"] == 2.0


def test_psi_figure_data():
    _, text = call("psi-figure", "--n", "100", "--points", "2001")
    _, rows = table(text)
    u = np.array([float(r[0]) for r in rows])
    psi = np.array([float(r[1]) for r in rows])
    assert u[0] == 0.0 and u[-1] == 5.0 and np.all(np.isfinite(psi))


def test_potential_file(tmp_path):
    path = tmp_path / "v.json"
    path.write_text(json.dumps({"type": "mixture", "components": [
        {"type": "gaussian", "center": [1.0, 0.0]}, {"type": "gaussian", "center": [-1.0, 0.5]}]}))
    code, text = call("reduced-spectrum", "--n", "6", "--basis", "8", "--potential", str(path))
    assert code == EXIT_OK and '"route"' not in text.split("\n")[-2]
    assert '# route="grid"' in text


@pytest.mark.parametrize("argv", [
    ["symbol", "--n", "4", "--potential", "/nonexistent.json"],
    ["symbol", "--n", "4", "--potential", '{"type": "hexagon"}'],
    ["symbol", "--n", "4", "--energy", "-1"],
    ["symbol", "--n", "4", "--xi", "1,2,3"],
    ["szego-check", "--n-list", ""],
    ["inverse", "--r-grid", "lin:0:1:4"],
    ["two-route", "--n", "30", "--N1", "20"],
    ["two-route", "--M", "40", "--N2", "20"],
    ["laguerre-zeros", "--n", "0"],
    ["no-such-command"],
])
def test_configuration_errors(argv):
    assert call(*argv)[0] == EXIT_CONFIG


def test_resource_cap():
    assert call("cluster-spectrum", "--memory-cap-mb", "1")[0] == EXIT_RESOURCE


def test_numerical_failure(monkeypatch):
    from landau_clusters import cli, ConvergenceError

    def boom(cfg, a):
        raise ConvergenceError("did not settle")
    monkeypatch.setitem(cli.COMMANDS, "sobolev", boom)
    assert call("sobolev")[0] == EXIT_NUMERIC


def test_workers_keep_order(monkeypatch):
    argv = ["szego-check", "--n-list", "16,8,12", "--preset", "ci"]
    _, serial = call(*argv)
    monkeypatch.setenv("LANDAU_WORKERS", "3")
    _, threaded = call(*argv)
    assert serial == threaded
    monkeypatch.setenv("LANDAU_WORKERS", "many")
    assert call(*argv)[0] == EXIT_CONFIG


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "landau_clusters", "laguerre-zeros", "--n", "3"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and proc.stdout.count("\n") >= 4
