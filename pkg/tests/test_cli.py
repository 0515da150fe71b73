# tests/test_cli.py

import io
import json

import pytest

from modules.catalog import build, get_entry
from modules.cli import EXIT_FAILURE, EXIT_OK, EXIT_USAGE, run_command
from modules.extension_loader import serialize_extension, serialize_idempotent


def run(*argv):
    out = io.StringIO()
    code = run_command(list(argv), out=out)
    return code, out.getvalue()


@pytest.fixture
def m2diag_file(tmp_path):
    path = tmp_path / "m2diag.json"
    path.write_text(serialize_extension(build("m2diag-f2")), encoding="utf-8")
    return path


def test_catalog_lists_entries():
    code, text = run("catalog")
    assert code == EXIT_OK
    for name in ("identity-m2f3", "m2diag-f2", "trunc-p2", "trunc-p3", "trivial-f2", "c2-f2", "m2diag-q"):
        assert name in text


def test_catalog_emit_is_a_parsable_document():
    code, text = run("catalog", "trunc-p2", "--emit")
    assert code == EXIT_OK
    doc = json.loads(text)
    assert doc["algebra"]["dim"] == 4
    assert len(doc["subalgebra"]["basis"]) == 2


def test_classify_file_reports_golden_outcomes(m2diag_file):
    code, text = run("classify", str(m2diag_file), "--json")
    assert code == EXIT_OK
    report = json.loads(text)["reports"][0]
    assert report["classes"]["hirata"]["outcome"] == "holds"
    assert report["classes"]["liberal"]["outcome"] == "fails"
    assert report["classes"]["power"]["outcome"] == "fails"


def test_classify_is_deterministic(m2diag_file):
    first = run("classify", str(m2diag_file), "trunc-p2", "--json")
    second = run("classify", str(m2diag_file), "trunc-p2", "--json")
    assert first == second
    assert len(json.loads(first[1])["reports"]) == 2


def test_classify_text_and_subset():
    code, text = run("classify", "trunc-p2", "--classes", "liberal,power")
    assert code == EXIT_OK
    assert "liberal" in text and "separable" not in text


def test_usage_errors():
    assert run()[0] == EXIT_USAGE
    assert run("frobnicate")[0] == EXIT_USAGE
    assert run("classify", "no-such-thing")[0] == EXIT_USAGE
    assert run("classify", "trunc-p2", "--classes", "noetherian")[0] == EXIT_USAGE
    assert run("transport", "trunc-p2")[0] == EXIT_USAGE


def test_tool_failures_exit_one(tmp_path, monkeypatch):
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    assert run("classify", str(broken))[0] == EXIT_FAILURE
    assert run("catalog", "nope")[0] == EXIT_FAILURE
    assert run("demo", "counterexample", "--p", "5")[0] == EXIT_FAILURE
    monkeypatch.setenv("MOREXT_SEED", "not-a-number")
    assert run("catalog")[0] == EXIT_FAILURE


def test_transport_free_verifies_invariance():
    code, text = run("transport", "trunc-p2", "--free", "2", "--verify-invariance", "--lemmas", "--json")
    assert code == EXIT_OK
    transport = json.loads(text)["transport"]
    assert (transport["dim_Aprime"], transport["dim_Bprime"]) == (16, 8)
    moved = {row["class"]: row for row in transport["certificates"]}
    assert moved["liberal"]["status"] == "transported" and moved["liberal"]["verified"]
    assert transport["power"]["source"]["status"] == "holds"
    assert transport["power"]["target"]["status"] == "fails"
    assert transport["power"]["target"]["transferred"] is False
    assert all(row["holds"] for row in transport["invariance"])


def test_transport_along_an_idempotent(tmp_path, m2diag_file):
    ext = build("m2diag-f2")
    _, E = get_entry("m2diag-f2").idempotent(ext)
    idem = tmp_path / "idempotent.json"
    idem.write_text(serialize_idempotent(ext, E), encoding="utf-8")
    code, text = run("transport", str(m2diag_file), "--idempotent", str(idem), "--verify-invariance", "--json")
    assert code == EXIT_OK
    rows = json.loads(text)["transport"]["certificates"]
    assert {row["class"] for row in rows} >= {"separable", "strongly_separable", "weakly_separable"}
    assert all(row["verified"] for row in rows if row["status"] == "transported")
    assert all(row["verified"] is None for row in rows if row["status"].startswith("recomputed"))


def test_demo_counterexample_text():
    code, text = run("demo", "counterexample", "--p", "2")
    assert code == EXIT_OK
    assert "trunc-p2" in text
    assert "fails" in text


def test_excel_export(tmp_path):
    target = tmp_path / "report.xlsx"
    code, _ = run("classify", "trunc-p2", "--excel", str(target))
    assert code == EXIT_OK
    assert target.exists()


def test_output_dir_receives_json_and_text_reports(tmp_path):
    code, _ = run("classify", "trunc-p2", "--output-dir", str(tmp_path))
    assert code == EXIT_OK
    report = json.loads((tmp_path / "morext_report.json").read_text(encoding="utf-8"))
    assert report["reports"][0]["name"] == "trunc-p2"
    assert "== trunc-p2 over F_2 ==" in (tmp_path / "morext_report.txt").read_text(encoding="utf-8")
