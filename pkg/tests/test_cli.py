import json

import pytest

from finslerium.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_poincare_curvature(capsys):
    code, out, _ = run(capsys, "curvature", "--metric", "poincare", "--z", "0", "--v", "1")
    assert code == 0
    d = json.loads(out)
    assert d["schema"] == "finslerium/1"
    assert d["K"] == pytest.approx(-4.0, abs=1e-6)


def test_validate_exp_family(capsys):
    code, out, _ = run(capsys, "validate", "--metric", "expfam", "--param", "a=1", "--param", "b=0.5",
                       "--param", "M0=1", "--dim", "2", "--seed", "7")
    assert code == 0 and json.loads(out)["pass"] is True


def test_unknown_metric_is_usage_error(capsys):
    code, _, err = run(capsys, "curvature", "--metric", "nosuch")
    assert code == 2 and "exp-family" in err


@pytest.mark.parametrize("argv", [
    ["bogus"],
    ["curvature", "--nosuch-flag"],
    ["curvature", "--metric", "poincare", "--z", "2"],
    ["curvature", "--metric", "poincare", "--z", "1+"],
    ["comparison", "--format", "svg"],
    ["schwarz", "--metric", "poincare"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_verdict_failure_still_writes_manifest(capsys, tmp_path):
    code, _, _ = run(capsys, "validate", "--metric", "degenerate", "--samples", "20", "--out", str(tmp_path))
    assert code == 1
    man = json.loads((tmp_path / "manifest.json").read_text())
    assert man["exit_status"] == 1
    assert [o["path"] for o in man["outputs"]] == ["validate.json"]


def test_usage_error_writes_manifest(capsys, tmp_path):
    assert run(capsys, "curvature", "--metric", "nosuch", "--out", str(tmp_path))[0] == 2
    assert json.loads((tmp_path / "manifest.json").read_text())["exit_status"] == 2


def test_hypothesis_violation_exit(capsys):
    code, _, err = run(capsys, "schwarz", "--metric", "poincare", "--map", "power:2", "--k1", "-4", "--k2", "1")
    assert code == 3 and "hypothesis" in err


def test_estimated_bounds_hypothesis_violation(capsys):
    code, _, _ = run(capsys, "schwarz", "--metric", "poincare", "--target", "fs", "--estimate-bounds",
                     "--samples", "20")
    assert code == 3


def test_schwarz_artifacts(capsys, tmp_path):
    code, _, _ = run(capsys, "schwarz", "--metric", "poincare", "--map", "power:3", "--k1", "-4", "--k2", "-4",
                     "--samples", "50", "--format", "svg", "--out", str(tmp_path))
    assert code == 0
    svg = (tmp_path / "schwarz.svg").read_text()
    assert svg.startswith("<svg") and "#f7f7f7" not in svg.split("<circle")[0]
    assert json.loads((tmp_path / "schwarz.json").read_text())["verdict"] is True
    code, out, _ = run(capsys, "schwarz", "--metric", "poincare", "--map", "power:3", "--k1", "-4", "--k2", "-4",
                       "--samples", "50", "--format", "csv")
    assert code == 0 and out.splitlines()[0] == "re,im,value"


def test_other_commands(capsys):
    assert run(capsys, "comparison", "--curvature", "2", "--radii", "0.25,1")[0] == 0
    assert run(capsys, "kahler-check", "--samples", "20")[0] == 0
    assert run(capsys, "kahler-check", "--model", "flat", "--dim", "2", "--samples", "20")[0] == 0
    code, out, _ = run(capsys, "curvature-bounds", "--metric", "poincare", "--samples", "20")
    assert code == 0 and json.loads(out)["inf"] == pytest.approx(-4, abs=1e-6)
    code, out, _ = run(capsys, "phi-trace", "--metric", "poincare", "--map", "power:2", "--grid", "64,32")
    assert code == 0 and json.loads(out)["first_order_ok"]


def test_expression_metric_from_file(capsys, tmp_path):
    f = tmp_path / "g.txt"
    f.write_text("v1*vb1/(1 - z1*zb1)**2\n")
    code, out, _ = run(capsys, "curvature", "--metric", f"expr:{f}", "--dim", "1", "--z=-0.3+0.2i", "--v", "1")
    assert code == 0 and json.loads(out)["K"] == pytest.approx(-4, abs=1e-9)


def test_determinism(capsys, tmp_path):
    argv = ["schwarz", "--metric", "poincare", "--map", "embed:0.7071067811865476,0.7071067811865476",
            "--target", "expfam", "--target-dim", "2", "--estimate-bounds", "--samples", "30", "--seed", "5"]
    for name in ("a", "b"):
        assert main(argv + ["--out", str(tmp_path / name)]) == 0
    capsys.readouterr()
    a, b = (tmp_path / "a" / "schwarz.json").read_bytes(), (tmp_path / "b" / "schwarz.json").read_bytes()
    assert a == b
    ma = json.loads((tmp_path / "a" / "manifest.json").read_text())
    mb = json.loads((tmp_path / "b" / "manifest.json").read_text())
    assert ma["outputs"] == mb["outputs"] and ma["inputs"] == mb["inputs"]
