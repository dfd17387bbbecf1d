import json
import subprocess
import sys
from pathlib import Path

import pytest

from hcs_forge.cli import main
from hcs_forge.holonomic import parse_system
from hcs_forge.metricfile import format_metric, parse_metric
from hcs_forge.k3 import reference_kummer_metric
from hcs_forge.errors import ParseError

DATA = Path(__file__).resolve().parents[1] / "data"
FLAT = str(DATA / "flat3.metric")
PERTURBED = str(DATA / "perturbed3.metric")
SINGULAR = str(DATA / "singular3.metric")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_curvature_cotton_gprime_zero(capsys):
    code, out, _ = run(capsys, "curvature", "--metric", "kummer-gprime", "--tensor", "cotton", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["variance"] == ["lower"] * 3
    assert set(doc["components"]) == {"0"} and len(doc["components"]) == 27


def test_curvature_weyl_msy_zero(capsys):
    code, out, _ = run(capsys, "curvature", "--metric", "msy", "--tensor", "weyl", "--format", "json")
    assert code == 0 and set(json.loads(out)["components"]) == {"0"}


def test_curvature_flat_file_text(capsys):
    code, out, _ = run(capsys, "curvature", "--metric", FLAT, "--tensor", "riemann")
    assert code == 0 and "all components vanish" in out


def test_curvature_errors(capsys, tmp_path):
    bad = tmp_path / "bad.metric"
    bad.write_text("vars: a b c\n1; 0; 0\n0; 1; 0\n0; 0; a+*b\n")
    assert run(capsys, "curvature", "--metric", str(bad), "--tensor", "ricci")[0] == 2
    assert run(capsys, "curvature", "--metric", SINGULAR, "--tensor", "christoffel")[0] == 3
    assert run(capsys, "curvature", "--metric", "no-such-metric", "--tensor", "ricci")[0] == 2


def test_flatcheck(capsys):
    code, out, _ = run(capsys, "flatcheck", "--metric", "kummer-gprime")
    assert code == 0 and "locally conformally flat" in out
    code, out, _ = run(capsys, "flatcheck", "--metric", PERTURBED, "--format", "json")
    doc = json.loads(out)
    assert code == 4 and doc["flat"] is False and doc["witness"]["value"] != "0"


def test_pf_derive(capsys):
    code, out, _ = run(capsys, "pf-derive", "--metric", "kummer-gprime", "--format", "json")
    assert code == 0 and len(json.loads(out)["operators"]) == 5
    code, out, _ = run(capsys, "pf-derive", "--metric", FLAT, "--format", "json")
    doc = json.loads(out)
    assert all(x == "0" for op in doc["operators"] for x in op["d1"] + [op["d0"]])
    code, _, err = run(capsys, "pf-derive", "--metric", PERTURBED)
    assert code == 4 and "cotton" in err


def test_quadric_check_via_file(capsys, tmp_path):
    sysfile = tmp_path / "k.json"
    assert run(capsys, "pf-derive", "--metric", "kummer-gprime", "--format", "json", "--out", str(sysfile))[0] == 0
    assert len(parse_system(sysfile.read_text()).operators) == 5
    code, out, _ = run(capsys, "quadric-check", str(sysfile), "--base-point", "2,3,5", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["verdict"] == "PASS" and doc["rank"] == 5
    code, out, _ = run(capsys, "quadric-check", str(sysfile), "--base-point", "2,3,5", "--order", "2", "--format", "json")
    assert code == 5 and json.loads(out)["quadric_dim"] >= 2
    assert run(capsys, "quadric-check", str(sysfile), "--base-point", "2,3,6")[0] == 3
    assert run(capsys, "quadric-check", str(sysfile), "--base-point", "2,3")[0] == 2


def test_quadric_check_flat_model(capsys):
    code, out, _ = run(capsys, "quadric-check", "--metric", FLAT, "--base-point", "0,0,0", "--order", "4")
    assert code == 0 and "verdict: PASS" in out


def test_pipeline_default(capsys):
    code, out, _ = run(capsys, "pipeline", "kummer", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["overall"] == "PASS"
    assert len(doc["stages"]) == 9 and all(s["status"] == "PASS" for s in doc["stages"])
    assert set(doc["timings"]) == {s["name"] for s in doc["stages"]}
    assert all(len(s["digest"]) == 64 for s in doc["stages"])


def test_pipeline_alternate_point_and_determinism(capsys, tmp_path):
    outs = []
    for k in range(2):
        target = tmp_path / f"p{k}.json"
        code, _, _ = run(capsys, "pipeline", "kummer", "--base-point", "3,5,2", "--format", "json",
                         "--no-timings", "--out", str(target))
        assert code == 0
        outs.append(target.read_bytes())
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["overall"] == "PASS"


def test_pipeline_rejects_excluded_point(capsys):
    code, out, err = run(capsys, "pipeline", "kummer", "--base-point", "2,3,6")
    assert code == 3 and out == "" and "a*b - c" in err


def test_no_partial_write_on_failure(capsys, tmp_path):
    target = tmp_path / "out.json"
    target.write_text("previous")
    assert run(capsys, "pf-derive", "--metric", PERTURBED, "--out", str(target))[0] == 4
    assert target.read_text() == "previous"
    assert [p.name for p in tmp_path.iterdir()] == ["out.json"]


def test_metric_file_round_trip():
    g = reference_kummer_metric()
    text = format_metric(g)
    again = parse_metric(text)
    assert again == g and again.excluded == g.excluded
    assert format_metric(again) == text


def test_metric_file_errors():
    with pytest.raises(ParseError):
        parse_metric("1; 0\n0; 1\n")
    with pytest.raises(ParseError):
        parse_metric("vars: a b\n1; 0\n")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "hcs_forge.cli", "flatcheck", "--metric", PERTURBED],
                          capture_output=True, text=True)
    assert proc.returncode == 4 and proc.stdout.startswith("not flat")
