import json
import subprocess
import sys

import jsonschema
import pytest

from simpvex import runner
from simpvex.cli import main

TWO_PI = "6.283185307179586"


def write_config(path, cfg):
    path.write_text(json.dumps(cfg), encoding="utf-8")
    return str(path)


def square_config():
    return {
        "name": "tmp_square",
        "f": "x^2",
        "df": "2*x",
        "F": "(x^3)/3",
        "eta": {"kind": "difference"},
        "K": [0, 1],
        "a": 0,
        "b": 1,
        "q": [1, 2],
        "theorems": ["T3.1", "T3.2", "T4.1"],
    }


def sin_config():
    return {
        "name": "tmp_sin",
        "f": f"sin({TWO_PI}*x)",
        "df": f"{TWO_PI}*cos({TWO_PI}*x)",
        "F": f"-cos({TWO_PI}*x)/{TWO_PI}",
        "eta": {"kind": "difference"},
        "K": [0, 1],
        "a": 0,
        "b": 1,
        "q": [1],
        "theorems": ["C4.2"],
    }


def test_help_exits_zero():
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0


def test_missing_subcommand_exits_three():
    with pytest.raises(SystemExit) as info:
        main([])
    assert info.value.code == 3


def test_missing_required_flag_exits_three():
    with pytest.raises(SystemExit) as info:
        main(["moments"])
    assert info.value.code == 3


def test_moments_table(capsys):
    assert main(["moments", "--p", "1,1.5,2"]) == 0
    out = capsys.readouterr().out.strip().split("\n")
    assert out[0] == "p,closed_form,numeric,abs_diff"
    assert len(out) == 4
    for line in out[1:]:
        parts = line.split(",")
        assert float(parts[3]) <= 1e-10
    assert float(out[1].split(",")[1]) == pytest.approx(5.0 / 72.0, rel=1e-15)


def test_moments_rejects_bad_order(capsys):
    assert main(["moments", "--p", "0.5"]) == 3
    assert "error" in capsys.readouterr().err


def test_moments_out_file(tmp_path):
    target = tmp_path / "moments.csv"
    assert main(["moments", "--p", "2", "--out", str(target)]) == 0
    assert target.read_text().startswith("p,closed_form")


def test_check_passing_case(tmp_path, capsys):
    cfg = write_config(tmp_path / "case.json", square_config())
    assert main(["check", cfg]) == 0
    captured = capsys.readouterr()
    doc = json.loads(captured.out)
    jsonschema.validate(doc, runner.report_schema())
    assert doc["cases"][0]["verdict"] == "pass"
    assert "verdict: pass" in captured.err


def test_check_strict_flags_unmet(tmp_path):
    cfg = write_config(tmp_path / "sin.json", sin_config())
    assert main(["check", cfg]) == 0
    assert main(["check", cfg, "--strict"]) == 2


def test_check_invalid_eta_fixture(data_dir, capsys):
    assert main(["check", str(data_dir / "invalid_eta.json")]) == 3
    doc = json.loads(capsys.readouterr().out)
    assert doc["cases"][0]["verdict"] == "input_error"


def test_check_wrong_derivative_fixture(data_dir, capsys):
    assert main(["check", str(data_dir / "bad_df.json")]) == 3
    assert "disagrees" in capsys.readouterr().err


def test_check_missing_file(capsys):
    assert main(["check", "/no/such/file.json"]) == 3
    assert "cannot read" in capsys.readouterr().err


def test_check_malformed_json(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{oops", encoding="utf-8")
    assert main(["check", str(path)]) == 3
    assert "invalid JSON" in capsys.readouterr().err


def test_corpus_csv_filtered(capsys):
    assert main(["corpus", "--filter", "poly_x2", "--format", "csv"]) == 0
    captured = capsys.readouterr()
    lines = captured.out.strip().split("\n")
    assert lines[0].startswith("case,verdict,theorem")
    assert all(line.startswith("poly_x2,") for line in lines[1:])
    assert "loaded 1 corpus case(s)" in captured.err


def test_corpus_json_to_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    assert main(["--quiet", "corpus", "--filter", "poly_x4",
                 "--out", str(target)]) == 0
    assert capsys.readouterr().err == ""
    doc = json.loads(target.read_text())
    jsonschema.validate(doc, runner.report_schema())
    assert doc["counts"]["pass"] == 1


def test_corpus_empty_filter_passes(capsys):
    assert main(["corpus", "--filter", "zzz_nothing"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["counts"]["cases"] == 0


def test_corpus_strict_exits_two():
    assert main(["--quiet", "corpus", "--strict", "--filter", "sin_midpoint"]) == 2


def test_scan_square(capsys):
    assert main(["scan", "--f", "x^2", "--df", "2*x", "--F", "(x^3)/3",
                 "--K", "0,1", "--a-range", "0,0", "--b-range", "1,1",
                 "--q", "2", "--steps", "2", "--theorems", "T3.1"]) == 0
    lines = capsys.readouterr().out.strip().split("\n")
    assert lines[0] == "theorem,status,ratio,a,b,q,cells,skipped"
    # the quadratic has zero defect, so the ratio is exactly zero
    assert lines[1].startswith("T3.1,ok,0.0,")


def test_scan_rejects_unknown_theorem(capsys):
    assert main(["scan", "--f", "x^2", "--df", "2*x", "--K", "0,1",
                 "--a-range", "0,0", "--b-range", "1,1",
                 "--theorems", "T8.1"]) == 3
    assert "unknown theorem" in capsys.readouterr().err


def test_scan_rejects_bad_eta(capsys):
    assert main(["scan", "--f", "x^2", "--df", "2*x", "--K", "0,1",
                 "--a-range", "0,0", "--b-range", "1,1",
                 "--eta", "teleport"]) == 3
    assert "--eta expects" in capsys.readouterr().err


def test_scan_rejects_bad_range(capsys):
    assert main(["scan", "--f", "x^2", "--df", "2*x", "--K", "0,1",
                 "--a-range", "0", "--b-range", "1,1"]) == 3
    assert "exactly two numbers" in capsys.readouterr().err


def test_module_invocation():
    proc = subprocess.run([sys.executable, "-m", "simpvex.cli", "moments", "--p", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("p,closed_form")


def test_console_script_entry_point():
    proc = subprocess.run(["simpvex", "moments", "--p", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("p,closed_form")
