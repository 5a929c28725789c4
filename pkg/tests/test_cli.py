import csv
import io
import json
import os
import subprocess
import sys
import xml.etree.ElementTree as ET
from pathlib import Path

import jsonschema
import pytest

ROOT = Path(__file__).resolve().parents[1]
SCHEMAS = ROOT / "docs" / "schemas"
FIXTURE = Path(__file__).parent / "fixtures" / "colliding.json"


def run(*args, env=None):
    full_env = {k: v for k, v in os.environ.items() if k != "FRACTAL_CAP"}
    full_env.update(env or {})
    return subprocess.run(
        [sys.executable, "-m", "fractalscale", *map(str, args)],
        capture_output=True,
        text=True,
        env=full_env,
        timeout=120,
    )


def schema(name):
    return json.loads((SCHEMAS / name).read_text())


# --- diagnose ----------------------------------------------------------------


def test_diagnose_snowflake_text():
    p = run("diagnose", "-N", 4, "-r", 3, "--class", "additive", "--construction", "koch-snowflake")
    assert p.returncode == 0, p.stderr
    assert "regime: intermediate" in p.stdout
    assert "D = 1.262" in p.stdout
    assert "2√3/5 ≈ 0.692820" in p.stdout
    assert "* conditional on non-overlap" in p.stdout


def test_diagnose_snowflake_json():
    p = run("diagnose", "-c", "koch-snowflake", "--format", "json")
    doc = json.loads(p.stdout)
    jsonschema.validate(doc, schema("diagnosis.schema.json"))
    assert doc["area"]["exact"] == "0/1+2/5*s3"
    assert round(float(doc["area"]["decimal"]), 3) == 0.693
    assert doc["conditional_on_nonoverlap"] is True


def test_diagnose_subcritical_subtractive():
    p = run("diagnose", "-N", 2, "-r", 3, "--class", "subtractive", "--format", "json")
    doc = json.loads(p.stdout)
    jsonschema.validate(doc, schema("diagnosis.schema.json"))
    assert (doc["regime"], doc["perimeter"], doc["area"]["verdict"]) == ("subcritical", "tends_to_zero", "zero")
    assert doc["conditional_on_nonoverlap"] is False


def test_diagnose_supercritical_boundary():
    p = run("diagnose", "-N", 9, "-r", 3, "--class", "additive")
    assert p.returncode == 0 and "regime: supercritical" in p.stdout


@pytest.mark.parametrize(
    "args",
    [
        ("diagnose", "-N", 4),
        ("diagnose", "-N", "x", "-r", 3, "--class", "additive"),
        ("diagnose", "-N", 4, "-r", "1", "--class", "additive"),
        ("diagnose", "-N", 4, "-r", 3, "--class", "mixed"),
        ("diagnose", "-N", 5, "-c", "koch-snowflake"),
        ("series", "-c", "nope", "--depth", 1),
        ("series", "--depth", 1),
        ("frobnicate",),
        (),
    ],
)
def test_flag_errors_exit_2(args):
    assert run(*args).returncode == 2


def test_invalid_file_exits_3(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"name": "b", "class": "additive", "N": 3, "r": 3, "base": "square", "generator": [["0","0"],["1","0"]]}')
    p = run("diagnose", "--file", bad)
    assert p.returncode == 3 and "N+1" in p.stderr
    bad.write_text("{ not json")
    assert run("series", "--file", bad, "--depth", 1).returncode == 3


# --- series ------------------------------------------------------------------


def _csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_series_carpet_csv():
    rows = _csv(run("series", "-c", "sierpinski-carpet", "--depth", 3).stdout)
    assert (rows[3]["perimeter_exact"], rows[3]["area_exact"]) == ("2048/27", "512/729")


def test_series_koch_square_json():
    p = run("series", "-c", "koch-square", "--depth", 1, "--format", "json")
    doc = json.loads(p.stdout)
    jsonschema.validate(doc, schema("series.schema.json"))
    assert (doc["rows"][1]["perimeter_exact"], doc["rows"][1]["area_exact"]) == ("20/3", "13/9")


def test_series_depth_zero_single_row():
    assert len(_csv(run("series", "-c", "koch-square", "--depth", 0).stdout)) == 1


def test_series_cap_exit_4():
    assert run("series", "-c", "koch-snowflake", "--depth", 12).returncode == 4
    assert run("series", "-c", "koch-snowflake", "--depth", 12, "--cap", "0").returncode == 0
    assert run("series", "-c", "koch-snowflake", "--depth", 3, env={"FRACTAL_CAP": "10"}).returncode == 4
    assert run("series", "-c", "koch-snowflake", "--depth", 3, "--cap", "1000", env={"FRACTAL_CAP": "10"}).returncode == 0


# --- iterate -----------------------------------------------------------------


def test_iterate_snowflake(tmp_path):
    out, dump = tmp_path / "k.svg", tmp_path / "k.txt"
    p = run("iterate", "-c", "koch-snowflake", "--depth", 4, "--out", out, "--dump-points", dump)
    assert p.returncode == 0, p.stderr
    assert "768 segments" in p.stdout
    assert "measured perimeter 256/27" in p.stdout and "series match: no" not in p.stdout
    root = ET.parse(out).getroot()
    assert root.find("{http://www.w3.org/2000/svg}path").get("data-vertices") == "768"
    assert len(dump.read_text().splitlines()) == 768


def test_iterate_triangle_pieces(tmp_path):
    out = tmp_path / "t.svg"
    p = run("iterate", "-c", "sierpinski-triangle", "--depth", 5, "--out", out)
    assert p.returncode == 0 and "243 pieces" in p.stdout
    assert len(ET.parse(out).getroot().findall(".//{http://www.w3.org/2000/svg}polygon")) == 243


def test_iterate_series_only_exit_5():
    assert run("iterate", "-c", "add-10-3", "--depth", 1).returncode == 5
    assert run("verify-overlap", "-c", "add-10-3", "--max-depth", 1).returncode == 5


def test_iterate_cap_exit_4():
    assert run("iterate", "-c", "koch-snowflake", "--depth", 3, "--cap", 100).returncode == 4


# --- verify-overlap ----------------------------------------------------------


def test_verify_koch_square():
    p = run("verify-overlap", "-c", "koch-square", "--max-depth", 3, "--format", "json")
    assert p.returncode == 0
    doc = json.loads(p.stdout)
    jsonschema.validate(doc, schema("overlap-report.schema.json"))
    assert [r["certified"] for r in doc] == [True] * 4


def test_verify_colliding_fixture_exit_1():
    p = run("verify-overlap", "--file", FIXTURE, "--max-depth", 2, "--format", "json")
    assert p.returncode == 1
    doc = json.loads(p.stdout)
    jsonschema.validate(doc, schema("overlap-report.schema.json"))
    assert doc[-1]["certified"] is False and len(doc[-1]["witness"]) == 2
    text = run("verify-overlap", "--file", FIXTURE, "--max-depth", 3)
    assert "FAILED" in text.stdout and "depth 3: skipped" in text.stdout


def test_verify_depth_zero():
    assert run("verify-overlap", "-c", "koch-snowflake", "--max-depth", 0).returncode == 0


def test_verify_subtractive_is_flag_error():
    assert run("verify-overlap", "-c", "sub-5-3", "--max-depth", 1).returncode == 2


# --- regime-plot and table ---------------------------------------------------


def test_regime_plot(tmp_path):
    out = tmp_path / "r.svg"
    assert run("regime-plot", "--out", out).returncode == 0
    root = ET.parse(out).getroot()
    assert len(root.findall(".//{http://www.w3.org/2000/svg}circle")) == 4
    assert run("regime-plot", "--out", out, "--mark", "10,3,Z").returncode == 0
    marks = ET.parse(out).getroot().findall(".//{http://www.w3.org/2000/svg}circle")
    assert [m.get("data-regime") for m in marks if m.get("data-label") == "Z"] == ["supercritical"]
    assert run("regime-plot", "--mark", "10").returncode == 2


def test_table_text():
    p = run("table")
    assert p.returncode == 0
    lines = {line.split()[0]: line.split() for line in p.stdout.splitlines()[1:9]}
    assert lines["koch-square"][1:] == ["5", "3", "additive", "5/3", "5/9", "1.465", "intermediate", "divergent", "2", "conditional"]
    assert lines["sub-5-3"][-1] == "0"
    assert lines["sub-2-3"][7] == "subcritical"


def test_table_json():
    doc = json.loads(run("table", "--format", "json").stdout)
    jsonschema.validate(doc, schema("table.schema.json"))
    assert len(doc) == 8


def test_outputs_are_byte_identical_across_runs():
    for args in (("table",), ("series", "-c", "add-6-4", "--depth", 4, "--format", "json"), ("regime-plot",)):
        assert run(*args).stdout == run(*args).stdout
