import csv
import io
import subprocess
import sys

import numpy as np
import pytest

from rnds_maxwell.cli import main, parse_range, parse_surfaces
from rnds_maxwell.config import RunConfig, config_keys, load_config, parse_config
from rnds_maxwell.errors import ConfigurationError


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


# -- config ----------------------------------------------------------------------


def test_defaults():
    cfg = RunConfig()
    cfg.validate()
    assert cfg.params.Q == 0.5 and cfg.grid.n_points == 4001
    assert "evolution.t_end" in config_keys()


def test_parse_config_types_and_comments():
    cfg = parse_config("""
# run
params.M = 1.1
grid.n_points = 801   # nodes
evolution.solver = maxwell
""")
    assert cfg.params.M == 1.1 and isinstance(cfg.grid.n_points, int)
    assert cfg.evolution.solver == "maxwell"


@pytest.mark.parametrize("text", ["params.X = 1", "bogus.M = 1", "params.M 1", "grid.n_points = 2.5"])
def test_parse_config_errors(text):
    with pytest.raises(ConfigurationError):
        parse_config(text)


@pytest.mark.parametrize("key, value", [
    ("evolution.solver", "spectral"), ("initial.type", "square"), ("grid.n_points", "8"),
    ("evolution.dt_factor", "1.5"), ("evolution.boundary", "periodic"), ("output.format", "hdf5"),
])
def test_validate_errors(key, value):
    cfg = RunConfig()
    cfg.set(key, value)
    with pytest.raises(ConfigurationError):
        cfg.validate()


def test_load_config_missing(tmp_path):
    with pytest.raises(ConfigurationError):
        load_config(tmp_path / "nope.cfg")


def test_parse_helpers():
    np.testing.assert_allclose(parse_range("0:1:3"), [0, 0.5, 1])
    for bad in ("0:1", "a:b:c", "1:0:3", "0:1:0", "0:1:1"):
        with pytest.raises(ConfigurationError):
            parse_range(bad)
    s = parse_surfaces("parabola:5, cone:2,slice:0")
    assert [x.kind for x in s] == ["parabola", "cone", "slice"]
    for bad in ("", "parabola", "parabola:x", "disk:1"):
        with pytest.raises(ConfigurationError):
            parse_surfaces(bad)


# -- commands --------------------------------------------------------------------


def test_geometry_command(capsys):
    code, out, _ = run(["geometry"], capsys)
    assert code == 0
    table = dict(rows(out)[1:])
    assert float(table["r2"]) == pytest.approx(1.9450550104851592)
    assert float(table["P2"]) == pytest.approx(2.8228756555322954)
    assert float(table["trap_left"]) == pytest.approx(-5.998783359650361)


@pytest.mark.parametrize("argv, code", [
    (["geometry", "--params.Q", "0"], 2),
    (["geometry", "--params.Lambda", "0.5"], 2),
    (["geometry", "--params.M", "5"], 2),
    (["geometry", "--params.Z", "1"], 1),
    (["geometry", "--config", "/nonexistent.cfg"], 1),
    (["frobnicate"], 1),
    ([], 1),
])
def test_exit_codes(argv, code, capsys):
    c, _, err = run(argv, capsys)
    assert c == code
    assert err


def test_inadmissible_names_clause(capsys):
    _, _, err = run(["geometry", "--params.Q", "0"], capsys)
    assert "clause" in err


def test_scan(capsys):
    code, out, _ = run(["scan", "--M-range", "0.2:2.5:47", "--Q-range", "0.5:0.5:1", "--Lambda", "0.01"], capsys)
    assert code == 0
    body = rows(out)[1:]
    flags = [int(r[3]) for r in body]
    assert len(body) == 47
    assert sum(a != b for a, b in zip(flags, flags[1:])) == 2
    code, _, _ = run(["scan", "--M-range", "1:0:3", "--Q-range", "0.5:0.5:1", "--Lambda", "0.01"], capsys)
    assert code == 1


def test_evolve_and_snapshot(tmp_path, capsys):
    snap = tmp_path / "s.txt"
    table = tmp_path / "e.csv"
    argv = ["evolve", "--grid.L", "80", "--grid.n_points", "801", "--evolution.t_end", "2",
            "--evolution.solver", "maxwell", "--out", str(table), "--snapshot", str(snap)]
    code, _, _ = run(argv, capsys)
    assert code == 0
    body = rows(table.read_text())
    assert body[0][0] == "t" and len(body) > 10
    assert float(body[-1][0]) == pytest.approx(2.0)
    from rnds_maxwell.fields import read_snapshot

    assert read_snapshot(snap).t == pytest.approx(2.0)


def test_evolve_rejects_wide_profile(capsys):
    code, _, err = run(["evolve", "--grid.L", "40", "--grid.n_points", "401", "--evolution.t_end", "1"], capsys)
    assert code == 1 and "enlarge L" in err


def test_evolve_numeric_failure(capsys):
    argv = ["evolve", "--grid.L", "80", "--grid.n_points", "801", "--evolution.t_end", "2",
            "--evolution.solver", "maxwell", "--evolution.constraint_ceiling", "1e-12"]
    code, _, err = run(argv, capsys)
    assert code == 4 and "step 0" in err


def test_flux_command(capsys):
    argv = ["flux", "--evolution.solver", "maxwell", "--grid.L", "80", "--grid.n_points", "801",
            "--evolution.t_end", "84", "--surfaces", "slice:0,parabola:2", "--record-every", "4"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    body = rows(out)
    assert body[0] == ["kind", "t0", "which", "flux", "t0sq_flux"]
    assert float(body[1][3]) > float(body[2][3]) > 0
    code, _, _ = run(["flux", "--grid.n_points", "801", "--grid.L", "80"], capsys)
    assert code == 1


def test_flux_coverage_error(capsys):
    argv = ["flux", "--evolution.solver", "maxwell", "--grid.L", "80", "--grid.n_points", "801",
            "--evolution.t_end", "5", "--surfaces", "parabola:2"]
    code, _, err = run(argv, capsys)
    assert code == 1 and "stored range" in err


def test_check_passes_and_mutation_fails(capsys):
    code, out, _ = run(["check"], capsys)
    assert code == 0, out
    assert all(",PASS," in line for line in out.splitlines()[1:])
    code, out, err = run(["check", "--corrupt-trapping"], capsys)
    assert code == 3
    assert "conformal_charge_identity,FAIL" in out
    assert "invariant failed" in err


def test_module_entry_point():
    p = subprocess.run([sys.executable, "-m", "rnds_maxwell", "geometry"], capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.startswith("quantity,value")
