import csv
import json

import numpy as np
import pytest

from majorana_worldlines.cli import EXIT_CAUSALITY, EXIT_OK, EXIT_SCHEMA, main
from majorana_worldlines.presets import PRESETS, coarsened, get_preset, list_presets
from majorana_worldlines.scenario import (CSV_COLUMNS, ScenarioError, parse_scenario, resolve_curve,
                                          run_scenario, serialize)

SMALL = """\
name: demo
defaults:
  spectrum: {kind: superohmic}
  grid: {tau_max: 0.3, step: 0.01}
curves:
  - label: a1
    worldline: {family: ConstAccel, a: 1.0}
  - label: a5
    worldline: {family: ConstAccel, a: 5.0}
    switching: {kind: gaussian, sigma: 0.2}
analysis:
  overtaking: [[a1, a5]]
  backflow: true
"""


@pytest.fixture
def small_file(tmp_path):
    p = tmp_path / "demo.yaml"
    p.write_text(SMALL)
    return p


def test_parse_and_round_trip():
    sc = parse_scenario(SMALL)
    assert sc.name == "demo"
    assert parse_scenario(serialize(sc)) == sc


def test_defaults_are_merged_under_curve_fields():
    sc = parse_scenario(SMALL)
    cfg = resolve_curve(sc.data, sc.data["curves"][1])
    assert cfg["switching"] == {"kind": "gaussian", "sigma": 0.2}
    assert cfg["spectrum"]["kind"] == "superohmic"
    assert cfg["frame"] == "M" and cfg["grid"]["tau_max"] == 0.3


@pytest.mark.parametrize("text, line, field", [
    ("name: x\ncurves:\n  - label: a\n    worldline: {family: ConstAccel, a: 1}\n    spectrum:\n"
     "      kind: lorentzian\n", 6, "curves[0].spectrum.kind"),
    ("name: x\ncurves:\n  - label: a\n    worldline: {family: ConstAccel}\n", 4, "curves[0].worldline.a"),
    ("name: x\ncurves:\n  - label: a\n    worldline: {family: Static}\n  - label: a\n"
     "    worldline: {family: Static}\n", 3, "curves"),
    ("name: x\ncurves:\n  - label: a\n    worldline: {family: Static}\n    bogus: 1\n", 3, "curves[0]"),
])
def test_schema_errors_carry_line_and_field(text, line, field):
    with pytest.raises(ScenarioError) as info:
        parse_scenario(text, "s.yaml")
    assert info.value.line == line
    assert info.value.field_path == field
    assert str(info.value).startswith(f"s.yaml:{line}:")


def test_malformed_yaml_is_a_scenario_error():
    with pytest.raises(ScenarioError):
        parse_scenario("name: [unclosed\n")


def test_catalog_has_every_figure_panel():
    names = [n for n, _ in list_presets()]
    assert len(names) == 23 == len(PRESETS)
    assert "fig2-left" in names and "fig8" in names and "fig15-right" in names


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_presets_round_trip(name):
    sc = get_preset(name)
    assert parse_scenario(serialize(sc)) == sc


def test_unknown_preset():
    with pytest.raises(KeyError):
        get_preset("fig99")


def test_coarsened_preset_keeps_structure():
    sc = coarsened(get_preset("fig5-right"), 4, 3)
    scans = sc.data["scans"]
    assert all(len(s["values"]) == 3 for s in scans)


def test_run_summary_and_states():
    res = run_scenario(parse_scenario(SMALL))
    assert res.converged
    assert set(res.summary["curves"]) == {"a1", "a5"}
    keys = set(res.summary["analysis"])
    assert "backflow:a5" in keys and any(k.startswith("overtaking") for k in keys)


def test_cli_outputs_and_determinism(small_file, tmp_path, capsys):
    out1, out2 = tmp_path / "o1", tmp_path / "o2"
    assert main(["run", str(small_file), "--out", str(out1)]) == EXIT_OK
    assert main(["run", str(small_file), "--out", str(out2), "--jobs", "2"]) == EXIT_OK
    for f in ("demo__a1.csv", "demo__a5.csv", "demo__summary.json"):
        assert (out1 / f).read_bytes() == (out2 / f).read_bytes()
    with open(out1 / "demo__a5.csv") as fh:
        rows = list(csv.reader(fh))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 32
    data = np.array([[float(x) for x in r[:-1]] for r in rows[1:]])
    assert np.all(data[:, 1:3] <= 0)
    assert np.all((data[:, 6] >= 0) & (data[:, 6] <= 1))
    manifest = json.loads((out1 / "demo__manifest.json").read_text())
    files = {f["file"]: f for f in manifest["files"]}
    assert {"demo__a1.csv", "demo__a5.csv"} <= set(files)
    assert all(c["unit"] for c in files["demo__a5.csv"]["columns"])


def test_environment_frame_uses_time_column(tmp_path):
    text = SMALL.replace("  grid:", "  frame: E\n  grid:")
    p = tmp_path / "e.yaml"
    p.write_text(text)
    assert main(["run", str(p), "--out", str(tmp_path)]) == EXIT_OK
    assert (tmp_path / "demo__a1.csv").read_text().startswith("t,I1,")


def test_cli_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("name: x\ncurves: []\nfoo: 1\n")
    assert main(["validate", str(bad)]) == EXIT_SCHEMA
    assert main(["run", str(tmp_path / "missing.yaml")]) == EXIT_SCHEMA
    fast = tmp_path / "fast.yaml"
    fast.write_text("name: x\ncurves:\n  - label: c\n    grid: {tau_max: 0.1, step: 0.01}\n"
                    "    worldline: {family: Circular, omega: 1.5}\n")
    assert main(["run", str(fast), "--out", str(tmp_path)]) == EXIT_CAUSALITY
    assert main(["preset", "nope"]) == EXIT_SCHEMA
    assert main(["list-presets"]) == EXIT_OK
    assert "fig13" in capsys.readouterr().out


def test_preset_dump_is_a_valid_scenario(capsys):
    assert main(["preset", "fig11-right", "--dump"]) == EXIT_OK
    assert parse_scenario(capsys.readouterr().out) == get_preset("fig11-right")
