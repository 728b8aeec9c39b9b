import json
from pathlib import Path

import pytest
from jsonschema import Draft202012Validator

from bernconv.cli import main
from bernconv.specdoc import parse_document, to_document

REPO = Path(__file__).resolve().parents[1]
SPECS = REPO / "specs"
SPEC_SCHEMA = json.loads((REPO / "schemas" / "spec.schema.json").read_text())
REPORT_SCHEMA = json.loads((REPO / "schemas" / "report.schema.json").read_text())

_spec_validator = Draft202012Validator(SPEC_SCHEMA)
_report_validator = Draft202012Validator(REPORT_SCHEMA)


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def validate_report(report):
    errors = sorted(_report_validator.iter_errors(report), key=str)
    assert not errors, errors[0] if errors else None
    if report.get("spec") is not None:
        spec_errors = sorted(_spec_validator.iter_errors(report["spec"]), key=str)
        assert not spec_errors, spec_errors[0] if spec_errors else None


# --- spec documents ---------------------------------------------------------

@pytest.mark.parametrize("path", sorted(SPECS.glob("*.json")), ids=lambda p: p.stem)
def test_shipped_specs_valid_and_round_trip(path):
    doc = json.loads(path.read_text())
    errors = sorted(_spec_validator.iter_errors(doc), key=str)
    assert not errors, errors[0] if errors else None
    spec, name, description = parse_document(doc)
    assert to_document(spec, name, description) == doc


def test_unknown_fields_rejected():
    doc = {
        "scales": {"kind": "cantor-like", "coef": 2.0, "base": 3, "oops": 1},
        "digits": {"kind": "constant", "p0": 0.5},
    }
    from bernconv.errors import SpecValidationError

    with pytest.raises(SpecValidationError, match="oops"):
        parse_document(doc)
    with pytest.raises(SpecValidationError):
        parse_document({"digits": {"kind": "constant", "p0": 0.5}})


# --- commands -----------------------------------------------------------------

def test_classify_report(capsys):
    code, report = run_cli(capsys, "classify", str(SPECS / "cantor.json"))
    assert code == 0
    validate_report(report)
    assert report["result"]["outcome"] == "singular-continuous"
    assert report["spec"]["name"] == "cantor"
    assert all(c["certified"] for c in report["result"]["certificates"])


def test_measure_report(capsys):
    code, report = run_cli(capsys, "measure", str(SPECS / "two_term_half.json"))
    assert code == 0
    validate_report(report)
    assert report["result"]["kind"] == "positive"
    value = report["result"]["value"]
    assert value["lo"] <= 0.5 <= value["hi"]


def test_dimension_report_with_warning(capsys):
    code, report = run_cli(
        capsys, "dimension", str(SPECS / "cantor.json"), "--variant", "as-printed"
    )
    assert code == 0
    validate_report(report)
    assert report["result"]["liminf"] == pytest.approx(0.23104906018664842)
    assert any("as-printed" in w for w in report["warnings"])
    code, report = run_cli(capsys, "dimension", str(SPECS / "cantor.json"))
    assert report["params"]["variant"] == "log-corrected"
    assert report["warnings"] == []


def test_support_report_and_csv(capsys, tmp_path):
    csv_path = tmp_path / "intervals.csv"
    code, report = run_cli(
        capsys, "support", str(SPECS / "cantor.json"), "--level", "4",
        "--csv", str(csv_path),
    )
    assert code == 0
    validate_report(report)
    assert report["result"]["interval_count"] == 16
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "lo,hi"
    assert len(lines) == 17
    lo, hi = map(float, lines[1].split(","))
    assert lo == 0.0 and hi == pytest.approx(1.0 / 81.0)


def test_cdf_grid_csv(capsys, tmp_path):
    csv_path = tmp_path / "cdf.csv"
    code, report = run_cli(
        capsys, "cdf", str(SPECS / "uniform.json"),
        "--from", "0", "--to", "1", "--points", "11", "--csv", str(csv_path),
    )
    assert code == 0
    validate_report(report)
    rows = csv_path.read_text().strip().splitlines()[1:]
    mid = rows[5].split(",")
    assert float(mid[0]) == pytest.approx(0.5)
    assert float(mid[1]) == pytest.approx(0.5, abs=1e-9)


def test_sample_out_file_and_determinism(capsys, tmp_path):
    out1, out2 = tmp_path / "a.txt", tmp_path / "b.txt"
    code1, report1 = run_cli(
        capsys, "sample", str(SPECS / "cantor.json"),
        "--count", "500", "--seed", "11", "--out", str(out1),
    )
    code2, report2 = run_cli(
        capsys, "sample", str(SPECS / "cantor.json"),
        "--count", "500", "--seed", "11", "--out", str(out2),
    )
    assert code1 == code2 == 0
    validate_report(report1)
    assert out1.read_bytes() == out2.read_bytes()
    assert len(out1.read_text().splitlines()) == 500
    report1["result"].pop("out_path")
    report2["result"].pop("out_path")
    assert report1 == report2


def test_report_bytes_deterministic(capsys):
    code1 = main(["classify", str(SPECS / "cantor.json")])
    out1 = capsys.readouterr().out
    code2 = main(["classify", str(SPECS / "cantor.json")])
    out2 = capsys.readouterr().out
    assert code1 == code2 == 0
    assert out1 == out2


def test_classify_reports_clamped_indices(capsys, tmp_path):
    doc = {
        "scales": {"kind": "cantor-like", "coef": 2.0, "base": 3},
        "digits": {"kind": "perturbed", "p0": 0.5, "c": 1.0, "s": 1.0},
    }
    path = tmp_path / "clamped.json"
    path.write_text(json.dumps(doc))
    code, report = run_cli(capsys, "classify", str(path))
    assert code == 0
    validate_report(report)
    assert any("clamped" in w and "1" in w for w in report["warnings"])


def test_laws_report(capsys):
    code, report = run_cli(capsys, "laws", "--count", "300", "--seed", "3")
    assert code == 0
    validate_report(report)
    assert report["result"]["violation_count"] == 0
    assert report["result"]["witness_passed"] is True
    assert report["seed"] == 3


def test_demo_report(capsys):
    code, report = run_cli(
        capsys, "demo-counterexample", "--p", "0.4", "--scale", "0.8", "--level", "10"
    )
    assert code == 0
    validate_report(report)
    assert report["result"]["product_criterion"]["kind"] == "zero-limit"
    assert report["result"]["upstairs_outcome"] == "singular"


def test_oracle_reports(capsys):
    code, report = run_cli(
        capsys, "oracle", "box-count", str(SPECS / "cantor.json"),
        "--level", "12", "--box-size", "1/6561",
    )
    assert code == 0
    validate_report(report)
    assert report["result"]["box-count"]["occupied"] == 256

    code, report = run_cli(
        capsys, "oracle", "hellinger", str(SPECS / "uniform.json"),
        str(SPECS / "biased_singular.json"), "--level", "12",
    )
    assert code == 0
    assert report["result"]["hellinger"]["abs_difference"] <= 1e-10

    code, report = run_cli(
        capsys, "oracle", "compare-cdf", str(SPECS / "cantor.json"), "--level", "12"
    )
    assert code == 0
    assert report["result"]["compare-cdf"]["max_violation"] <= 1e-10


# --- exit codes ------------------------------------------------------------------

def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "scales": {"kind": "cantor-like", "coef": 2.0, "base": 3, "bogus": True},
        "digits": {"kind": "constant", "p0": 0.5},
    }))
    code, report = run_cli(capsys, "classify", str(bad))
    assert code == 2
    validate_report(report)
    assert "bogus" in report["error"]["message"]

    code, report = run_cli(capsys, "measure", str(SPECS / "uniform.json"))
    assert code == 3
    validate_report(report)
    assert report["result"]["error"]["type"] == "HypothesisViolationError"

    assert main(["no-such-command"]) == 1
    capsys.readouterr()

    missing = tmp_path / "missing.json"
    code, report = run_cli(capsys, "classify", str(missing))
    assert code == 2
