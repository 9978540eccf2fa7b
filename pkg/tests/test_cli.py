import csv
import io
import json

import jsonschema
import pytest

from regrates.cli import main
from regrates.io import InputError, parse_problem, render_csv, validate_report


def write(tmp_path, doc, name="p.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(line for line in io.StringIO(text) if not line.startswith("#")))


def test_norms_dirac(tmp_path, capsys):
    path = write(tmp_path, {"schema_version": 1, "example": "dirac(1)"})
    code, out, _ = run(capsys, "norms", "--problem", path, "--nu", "0,0.5")
    assert code == 0
    table = rows(out)
    assert float(table[0]["interp"]) == float(table[0]["norm"])
    assert float(table[1]["triple_nu"]) == pytest.approx(1.0)
    assert float(table[1]["chain_c"]) == pytest.approx(1.0)


def test_rates_empty_range_is_header_only(tmp_path, capsys):
    path = write(tmp_path, {"schema_version": 1, "atoms": [[0.5, 1.0], [1.0, 2.0]]})
    code, out, _ = run(capsys, "rates", "--problem", path, "--nu", "0:1:0")
    assert code == 0
    assert out == "nu,method,order,r,sup,arg,lower,upper,pass\n"


def test_rates_landweber_pass_column(tmp_path, capsys):
    path = write(tmp_path, {"schema_version": 1, "example": "diag_example(1000)",
                            "method": {"kind": "landweber", "nu": [0.5, 1.0]}})
    code, out, _ = run(capsys, "rates", "--problem", path)
    assert code == 0
    assert [r["pass"] for r in rows(out)] == ["true", "true"]


def test_noisy_footer_and_determinism(tmp_path, capsys, monkeypatch):
    path = write(tmp_path, {"schema_version": 1, "example": "diag_example(20000)",
                            "noise": {"deltas": [1e-1, 1e-2, 1e-3, 1e-4, 0.0], "seed": 11},
                            "method": {"kind": "landweber", "nu": 1.0}})
    monkeypatch.setenv("REGRATES_THREADS", "1")
    code, first, _ = run(capsys, "noisy", "--problem", path)
    monkeypatch.setenv("REGRATES_THREADS", "4")
    _, second, _ = run(capsys, "noisy", "--problem", path)
    assert code == 0 and first == second
    footer = dict(line[2:].strip().split("=") for line in first.splitlines() if line.startswith("#"))
    assert float(footer["error_slope"]) == pytest.approx(2 / 3, abs=0.1)
    last = rows(first)[-1]
    assert float(last["delta"]) == 0.0 and float(last["error"]) == 0.0


def test_json_report_round_trip(tmp_path, capsys):
    path = write(tmp_path, {"schema_version": 1, "example": "dirac(1)", "method": {"nu": 0.5}})
    out_path = tmp_path / "r.json"
    code, _, _ = run(capsys, "rates", "--problem", path, "--format", "json", "--out", str(out_path))
    assert code == 0
    report = json.loads(out_path.read_text(encoding="utf-8"))
    validate_report(report)
    assert report["passed"] and report["checks"][0].keys() == {"id", "lhs", "rhs", "tolerance", "pass"}
    bad = dict(report, passed="yes")
    with pytest.raises(jsonschema.ValidationError):
        validate_report(bad)


def test_verify_constants(capsys):
    code, out, err = run(capsys, "verify", "--suite", "constants", "--format", "json")
    assert code == 0
    report = json.loads(out)
    validate_report(report)
    assert {c["id"] for c in report["checks"]} >= {"c2", "a*", "I(a*)"}
    assert "8/8" in err


@pytest.mark.parametrize("doc,needle", [
    ({"schema_version": 1}, "$"),
    ({"schema_version": 1, "atoms": [[0.0, 1.0]]}, "$.atoms[0][0]"),
    ({"schema_version": 1, "atoms": [[1.0, 1.0]], "example": "dirac(1)"}, "$"),
    ({"schema_version": 2, "example": "dirac(1)"}, "$.schema_version"),
    ({"schema_version": 1, "example": "dirac(-1)"}, "lam0"),
    ({"schema_version": 1, "example": "dirac(1)", "prior": [1.0, 2.0]}, "$.prior"),
])
def test_input_errors(tmp_path, capsys, doc, needle):
    path = write(tmp_path, doc)
    code, out, err = run(capsys, "norms", "--problem", path)
    assert code == 2 and out == ""
    assert needle in err


def test_malformed_json_reports_line(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "schema_version": 1,\n  oops\n}', encoding="utf-8")
    code, _, err = run(capsys, "norms", "--problem", str(path))
    assert code == 2 and "line 3" in err


def test_nu_outside_range_is_input_error(tmp_path, capsys):
    path = write(tmp_path, {"schema_version": 1, "example": "dirac(1)"})
    code, _, err = run(capsys, "norms", "--problem", path, "--nu", "1.5")
    assert code == 2 and "--nu" in err


def test_prior_is_subtracted():
    spec = parse_problem({"schema_version": 1, "atoms": [[0.5, 1.0], [1.0, 2.0]], "prior": [0.5, 2.0]})
    assert list(spec.problem.element.coefficients) == [0.5, 0.0]


def test_parse_problem_raises_input_error():
    with pytest.raises(InputError):
        parse_problem({"schema_version": 1, "atoms": [[1.0]]})


def test_csv_format():
    text = render_csv(["a", "b", "c"], [[0.1, True, float("inf")]], {"slope": 2 / 3})
    assert text == "a,b,c\n0.1,true,inf\n# slope=0.6666666666666666\n"
