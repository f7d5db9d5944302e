import json
import math

import numpy as np
import pytest

from discgeo import io
from discgeo.cli import build_config, build_parser, eval_number, main, UsageError


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_eval_number():
    assert eval_number("pi/10") == pytest.approx(math.pi / 10)
    assert eval_number("sqrt(3)/2") == pytest.approx(math.sqrt(3) / 2)
    with pytest.raises(UsageError):
        eval_number("banana(")


def test_config_precedence(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[run]\nh3 = 7\nhorizon = pi/2\n[extremal]\nh3 = 9\ngrid = 11\ntitle = demo\n")
    parse = build_parser().parse_args
    cfg = build_config(parse(["extremal", "--config", str(ini)]))
    assert (cfg.h3, cfg.grid, cfg.horizon, cfg.extra["title"]) == (9.0, 11, pytest.approx(math.pi / 2), "demo")
    cfg = build_config(parse(["extremal", "--config", str(ini), "--h3", "3"]))
    assert cfg.h3 == 3.0
    cfg = build_config(parse(["compare", "--config", str(ini)]))
    assert cfg.h3 == 7.0 and cfg.grid == 201


@pytest.mark.parametrize("argv", [["extremal", "--horizon", "-1"], ["extremal", "--grid", "1"],
                                  ["extremal", "--rel-tol", "0"], ["extremal", "--start", "1,2"],
                                  ["extremal", "--axes", "x,q"], ["table", "--algebra", "so5"],
                                  ["extremal", "--config", "/nonexistent.ini"], ["plot"]])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and "error" in err


def test_controllability(capsys):
    code, out, _ = run(capsys, "controllability", "--system", "disc4d")
    assert code == 0 and "rank 4/4 at 100/100 points" in out
    code, out, _ = run(capsys, "controllability", "--system", "disc3d", "--fields", "X1")
    assert code == 1 and "not controllable" in out
    code, out, _ = run(capsys, "controllability", "--system", "car", "--depth", "2", "--format", "json")
    assert code == 0 and json.loads(out)["controllable"]


def test_extremal_csv(capsys):
    code, out, _ = run(capsys, "extremal", "--grid", "5")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == ",".join(io.TRAJ_HEADER) and len(lines) == 6
    assert [float(v) for v in lines[1].split(",")] == pytest.approx([0, 0, 0, 0, 0.5, math.sqrt(3) / 2, 2])


def test_zero_covector_is_stationary(capsys):
    code, out, _ = run(capsys, "extremal", "--h1", "0", "--h2", "0", "--h3", "0", "--start", "1,2,3", "--grid", "3")
    rows = io.read_curves(out)["curve"]
    assert code == 0 and np.all(rows["x"] == 1) and np.all(rows["theta"] == 3)


def test_svg_replot_identical(tmp_path, capsys):
    svg = tmp_path / "fig.svg"
    assert main(["compare", "--format", "svg", "--out", str(svg), "--grid", "41"]) == 0
    csv_path = svg.with_suffix(".csv")
    assert csv_path.exists()
    again = tmp_path / "again.svg"
    assert main(["plot", "--input", str(csv_path), "--out", str(again)]) == 0
    assert svg.read_bytes() == again.read_bytes()
    assert svg.read_text().count("<polyline") == 2


def test_compare_gap_shrinks(capsys):
    gaps = []
    for hz in ("pi/10", "pi/20"):
        code, out, _ = run(capsys, "compare", "--h3", "20", "--horizon", hz, "--format", "json")
        gaps.append(json.loads(out)["sup_gap"])
    assert gaps[1] < gaps[0] / 2


def test_cutpoint(capsys):
    code, out, _ = run(capsys, "cutpoint")
    doc = json.loads(out)
    assert code == 0 and doc["cut_time"] == pytest.approx(math.pi)
    assert doc["cut_point"] == pytest.approx([0, math.pi / 4, 0])
    code, out, _ = run(capsys, "cutpoint", "--h1", "1", "--h2", "0", "--h3", "1")
    assert json.loads(out)["cut_point"] == pytest.approx([0, math.pi, 0])
    code, out, _ = run(capsys, "cutpoint", "--h3", "0")
    assert code == 2 and "error" in json.loads(out)


def test_orbit(capsys):
    code, out, _ = run(capsys, "orbit", "--sym", "t0", "--s-values", "0,0.5", "--grid", "21")
    curves = io.read_curves(out)
    assert code == 0 and set(curves) == {"s=0", "s=0.5"}
    code, out, _ = run(capsys, "orbit", "--sym", "t0", "--s-values", "0", "--grid", "5")
    assert set(io.read_curves(out)) == {"s=0"}
    code, out, _ = run(capsys, "orbit", "--sym", "t6", "--s-values", "0,1", "--grid", "21", "--format", "json")
    assert code == 0 and len(json.loads(out)["curves"]) == 2


def test_tanaka(capsys):
    code, out, _ = run(capsys, "tanaka")
    doc = json.loads(out)
    assert code == 0 and doc["dims"] == [1, 2, 2, 2, 1] and doc["reference_match"]
    code, out, _ = run(capsys, "tanaka", "--depth", "1")
    assert json.loads(out)["dims"] == [1, 2, 2, 2]
    code, out, _ = run(capsys, "tanaka", "--g0", "gl2")
    assert json.loads(out)["dims"] == [1, 2, 4, 6, 9]


def test_tanaka_custom_fixture(tmp_path, capsys):
    f = tmp_path / "ab.json"
    f.write_text(json.dumps({"dim": 2, "brackets": [], "grading": [-1, -1]}))
    code, out, _ = run(capsys, "tanaka", "--fixture", str(f), "--depth", "1")
    assert code == 0 and json.loads(out)["total_dim"] >= 2
    f.write_text(json.dumps({"dim": 2, "brackets": []}))
    assert run(capsys, "tanaka", "--fixture", str(f))[0] == 2


@pytest.mark.parametrize("name", ["disc", "heisenberg", "sl3", "car-fixed-phi", "disc4d"])
def test_tables(capsys, name):
    code, out, _ = run(capsys, "table", "--algebra", name)
    assert code == 0 and "|" in out


def test_json_schema_version(capsys):
    _, out, _ = run(capsys, "table", "--algebra", "heisenberg", "--format", "json")
    assert json.loads(out)["schema_version"] == io.SCHEMA_VERSION


def test_seed_env_changes_points(monkeypatch, capsys):
    monkeypatch.setenv("TOOL_SEED", "3")
    code, out, _ = run(capsys, "controllability", "--system", "disc3d", "--n-points", "5")
    assert code == 0 and "5/5" in out


def test_shipped_configs_render(tmp_path, capsys):
    import importlib.util
    from pathlib import Path

    path = Path(__file__).resolve().parent.parent / "scripts" / "reproduce_figures.py"
    found = importlib.util.spec_from_file_location("reproduce_figures", path)
    mod = importlib.util.module_from_spec(found)
    found.loader.exec_module(mod)
    assert mod.run(tmp_path) == 0
    names = {p.stem for p in tmp_path.glob("*.svg")}
    assert {"fig3", "fig4", "fig-orbit-t0", "fig5-t6", "fig6-t4", "fig7-t8"} <= names
