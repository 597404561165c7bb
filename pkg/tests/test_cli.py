"""Command-line interface: spec parsing, reports, exit codes, pipelines."""

import json
import subprocess
import sys

import pytest

import modinv.cli as cli
from modinv.annihilators import ExhaustionReport
from modinv.cli import main
from modinv.errors import AuditError
from modinv.homology import AnnihilationReport

TRANSVECTION = {"p": 2, "d": 2, "generators": [[1, 1, 0, 1]],
                "hsop": ["x1", "x0^2 + x0*x1"]}
TRIVIAL2 = {"p": 2, "d": 2, "generators": []}
TRIVIAL4 = {"p": 2, "d": 4, "generators": [],
            "hsop": ["x0", "x1", "x2", "x3"]}
PMI3 = {"p": 3, "d": 2, "generators": [[2, 0, 0, 2]],
        "hsop": ["x0^2", "x1^2"]}
BERTIN = {"p": 2, "d": 4,
          "generators": [[0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 1, 0, 0, 0]]}
S3 = {"p": 2, "d": 2, "generators": [[1, 1, 0, 1], [0, 1, 1, 0]]}
BERTIN_HSOP = ["x0 + x1 + x2 + x3",
               "x0*x1 + x0*x2 + x0*x3 + x1*x2 + x1*x3 + x2*x3",
               "x0*x1*x2 + x0*x1*x3 + x0*x2*x3 + x1*x2*x3",
               "x0*x1*x2*x3"]
D20_TEXT = "x0^2*x1 + x0*x1^2"  # top Dickson class for q=2, d=2


@pytest.fixture(scope="module")
def specs(tmp_path_factory):
    root = tmp_path_factory.mktemp("cli_specs")
    for name, obj in [("transvection.json", TRANSVECTION),
                      ("trivial2.json", TRIVIAL2),
                      ("trivial4.json", TRIVIAL4),
                      ("pmi3.json", PMI3),
                      ("bertin.json", BERTIN),
                      ("s3.json", S3),
                      ("singular.json", {"p": 2, "d": 2,
                                         "generators": [[1, 1, 1, 1]]}),
                      ("bertin_hsop.json", BERTIN_HSOP)]:
        (root / name).write_text(json.dumps(obj))
    (root / "broken.json").write_text("{not json")
    return root


def run_cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out else None), err


# ------------------------------------------------------------ spec loading


def test_missing_spec_file(capsys, specs):
    code, rep, _ = run_cli(capsys, "invariants", specs / "nowhere.json",
                           "--max-degree", 1)
    assert code == 2
    assert rep["status"] == "error"
    assert rep["error"]["kind"] == "input-error"
    assert "not found" in rep["error"]["message"]


def test_invalid_json_spec(capsys, specs):
    code, rep, _ = run_cli(capsys, "invariants", specs / "broken.json",
                           "--max-degree", 1)
    assert code == 2
    assert "not valid JSON" in rep["error"]["message"]


def test_nonprime_field_rejected(capsys, tmp_path):
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps({"p": 4, "d": 2, "generators": []}))
    code, rep, _ = run_cli(capsys, "invariants", spec, "--max-degree", 1)
    assert code == 2
    assert "field spec invalid" in rep["error"]["message"]


def test_singular_generator_message(capsys, specs):
    code, rep, _ = run_cli(capsys, "invariants", specs / "singular.json",
                           "--max-degree", 1)
    assert code == 2
    assert rep["error"]["message"] == "generator 0 not invertible"


def test_generator_shape_rejected(capsys, tmp_path):
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps({"p": 2, "d": 2, "generators": [[1, 0, 0]]}))
    code, rep, _ = run_cli(capsys, "invariants", spec, "--max-degree", 1)
    assert code == 2
    assert "expected 4 entries" in rep["error"]["message"]


def test_bad_hsop_text_in_spec(capsys, tmp_path):
    spec = tmp_path / "bad.json"
    spec.write_text(json.dumps({"p": 2, "d": 2, "generators": [],
                                "hsop": ["x9"]}))
    code, rep, _ = run_cli(capsys, "verify-corollaries", spec,
                           "--ledger", tmp_path / "none.json")
    assert code == 2
    assert "hsop[0]" in rep["error"]["message"]


# ------------------------------------------------------------ table commands


def test_invariants_trivial_dims(capsys, specs):
    code, rep, _ = run_cli(capsys, "invariants", specs / "trivial2.json",
                           "--max-degree", 3)
    assert code == 0
    assert [row["dim"] for row in rep["table"]] == [1, 2, 3, 4]
    assert set(rep["table"][1]["basis"]) == {"x0", "x1"}
    assert rep["schema_version"] == 1
    assert rep["monomial_order"] == "graded-lex-descending"


def test_invariants_transvection_dims(capsys, specs):
    code, rep, _ = run_cli(capsys, "invariants", specs / "transvection.json",
                           "--max-degree", 6)
    assert code == 0
    assert [row["dim"] for row in rep["table"]] == [1, 1, 2, 2, 3, 3, 4]
    assert rep["inputs"]["generators"] == [[1, 1, 0, 1]]
    assert rep["group_order"] == 2


def test_dickson_report(capsys, specs):
    code, rep, _ = run_cli(capsys, "dickson", specs / "transvection.json",
                           "--validate")
    assert code == 0
    assert rep["top_degree"] == 3
    assert [(row["degree"], row["expected_degree"]) for row in rep["family"]] \
        == [(3, 3), (2, 2)]
    assert rep["family"][0]["polynomial"] == D20_TEXT
    assert rep["hsop_validated"] is True


def test_steenrod_first_power(capsys, specs):
    code, rep, _ = run_cli(capsys, "steenrod", specs / "transvection.json",
                           "--power", 1, "--poly", "x0^2 + x0*x1")
    assert code == 0
    assert rep["output"] == "x0^2*x1 + x0*x1^2"
    assert rep["output_degree"] == 3


def test_steenrod_zeroth_power_is_identity(capsys, specs):
    code, rep, _ = run_cli(capsys, "steenrod", specs / "transvection.json",
                           "--power", 0, "--poly", "x0^2 + x0*x1")
    assert code == 0
    assert rep["output"] == rep["input"]


def test_steenrod_negative_power_rejected(capsys, specs):
    code, rep, _ = run_cli(capsys, "steenrod", specs / "transvection.json",
                           "--power", -1, "--poly", "x0")
    assert code == 2


def test_cohomology_routes_agree(capsys, specs):
    code, auto, _ = run_cli(capsys, "cohomology", specs / "transvection.json",
                            "--i", 1, "--max-degree", 4)
    assert code == 0
    assert auto["route"] == "periodic"
    assert [row["dim"] for row in auto["table"]] == [1, 0, 1, 0, 1]
    code, bar, _ = run_cli(capsys, "cohomology", specs / "transvection.json",
                           "--i", 1, "--max-degree", 4, "--route", "bar")
    assert code == 0
    assert [row["dim"] for row in bar["table"]] == [1, 0, 1, 0, 1]


def test_cohomology_periodic_needs_cyclic(capsys, specs):
    code, rep, _ = run_cli(capsys, "cohomology", specs / "s3.json",
                           "--i", 1, "--max-degree", 2, "--route", "periodic")
    assert code == 2
    assert "cyclic" in rep["error"]["message"]


# ------------------------------------------------------------ verify-main


def test_verify_main_trivial_vacuous(capsys, specs):
    code, rep, _ = run_cli(capsys, "verify-main", specs / "trivial2.json",
                           "--i", 1)
    assert code == 0
    assert rep["status"] == "certificate"
    assert rep["power"] == 1
    assert rep["minimal_at"] is None
    assert rep["route"] == "bar"


def test_verify_main_transvection_certificate(capsys, specs):
    code, rep, _ = run_cli(capsys, "verify-main", specs / "transvection.json",
                           "--i", 1, "--window", 12, "--max-power", 4)
    assert code == 0
    assert rep["status"] == "certificate"
    assert rep["power"] == 1
    assert rep["route"] == "periodic"
    assert rep["multiplier"] == D20_TEXT
    assert rep["multiplier_degree"] == 3
    assert [row["degree"] for row in rep["slices"]] == list(range(13))


def test_verify_main_index_zero_rejected(capsys, specs):
    code, rep, _ = run_cli(capsys, "verify-main", specs / "transvection.json",
                           "--i", 0)
    assert code == 2
    assert "annihilator is zero" in rep["error"]["message"]


def test_verify_main_reports_are_byte_identical(capsys, specs):
    code, _, _ = run_cli(capsys, "verify-main", specs / "transvection.json",
                         "--i", 1)
    assert code == 0
    main(["verify-main", str(specs / "transvection.json"), "--i", "1"])
    first, _ = capsys.readouterr()
    main(["verify-main", str(specs / "transvection.json"), "--i", "1"])
    second, _ = capsys.readouterr()
    assert first == second


def test_verify_main_witnesses_are_zero_matrices(capsys, specs):
    code, rep, _ = run_cli(capsys, "verify-main", specs / "transvection.json",
                           "--i", 1, "--window", 6, "--with-witnesses")
    assert code == 0
    dims = {row["degree"]: row["dim"] for row in rep["slices"]}
    for wit in rep["witnesses"]:
        m = wit["degree"]
        assert wit["shape"][1] == dims[m]
        assert all(not any(row) for row in wit["rows"])


def test_verify_main_bertin_is_gated(capsys, specs):
    code, rep, err = run_cli(capsys, "verify-main", specs / "bertin.json",
                             "--i", 1, "--window", 6)
    assert code == 2
    assert "--allow-slow" in rep["error"]["message"]
    assert "[estimate]" in err


def test_verify_main_exhaustion_exit_code(capsys, specs, monkeypatch):
    def fake_search(model, i, s, window, max_power):
        return ExhaustionReport(i, s, [0, 1], max_power, {0: 1, 1: 2})
    monkeypatch.setattr(cli, "nilpotency_search", fake_search)
    code, rep, _ = run_cli(capsys, "verify-main", specs / "transvection.json",
                           "--i", 1)
    assert code == 1
    assert rep["status"] == "exhausted"
    assert rep["surviving"] == [{"degree": 0, "rank": 1},
                                {"degree": 1, "rank": 2}]


def test_audit_failure_exit_code(capsys, specs, monkeypatch):
    def boom(ring):
        raise AuditError("planted failure")
    monkeypatch.setattr(cli, "dickson_top", boom)
    code, rep, _ = run_cli(capsys, "verify-main", specs / "transvection.json",
                           "--i", 1)
    assert code == 3
    assert rep["error"]["kind"] == "audit-failure"


# ------------------------------------------------------------ verify-loc


def test_verify_loc_transvection_short_circuits(capsys, specs, tmp_path):
    ledger = tmp_path / "ledger.json"
    code, rep, _ = run_cli(capsys, "verify-loc", specs / "transvection.json",
                           "--j", "all", "--ledger", ledger)
    assert code == 0
    assert rep["status"] == "cm-short-circuit"
    assert "Cohen-Macaulay" in rep["reason"]
    assert [c["exponent"] for c in rep["claims"]] == [1, 1]
    data = json.loads(ledger.read_text())
    assert data["exponents"] == {"0": 1, "1": 1}
    assert data["s"] == rep["multiplier"] == D20_TEXT


def test_verify_loc_nonmodular_reason(capsys, specs):
    code, rep, _ = run_cli(capsys, "verify-loc", specs / "trivial4.json",
                           "--j", 1)
    assert code == 0
    assert rep["status"] == "cm-short-circuit"
    assert "characteristic" in rep["reason"]
    assert rep["j"] == 1


def test_verify_loc_j_validation(capsys, specs):
    code, rep, _ = run_cli(capsys, "verify-loc", specs / "transvection.json",
                           "--j", 7)
    assert code == 2
    assert "--j must be in 0..1" in rep["error"]["message"]
    code, rep, _ = run_cli(capsys, "verify-loc", specs / "transvection.json",
                           "--j", "half")
    assert code == 2


def test_verify_loc_ledger_accumulates(capsys, specs, tmp_path):
    ledger = tmp_path / "ledger.json"
    run_cli(capsys, "verify-loc", specs / "trivial4.json", "--j", 1,
            "--ledger", ledger)
    run_cli(capsys, "verify-loc", specs / "trivial4.json", "--j", 3,
            "--ledger", ledger)
    data = json.loads(ledger.read_text())
    assert sorted(data["exponents"]) == ["1", "3"]


def test_verify_loc_ledger_multiplier_mismatch(capsys, specs, tmp_path):
    ledger = tmp_path / "ledger.json"
    run_cli(capsys, "verify-loc", specs / "transvection.json", "--j", 0,
            "--ledger", ledger)
    code, rep, _ = run_cli(capsys, "verify-loc", specs / "pmi3.json",
                           "--j", 0, "--ledger", ledger)
    assert code == 2
    assert "disagrees" in rep["error"]["message"]


def test_verify_loc_bertin_is_gated(capsys, specs):
    code, rep, err = run_cli(capsys, "verify-loc", specs / "bertin.json",
                             "--j", 3, "--hsop", specs / "bertin_hsop.json")
    assert code == 2
    assert "--allow-slow" in rep["error"]["message"]
    assert "[estimate]" in err


# ------------------------------------------------------ verify-corollaries


def test_corollaries_transvection_chain(capsys, specs, tmp_path):
    ledger = tmp_path / "ledger.json"
    run_cli(capsys, "verify-loc", specs / "transvection.json", "--j", "all",
            "--ledger", ledger)
    code, rep, _ = run_cli(capsys, "verify-corollaries",
                           specs / "transvection.json", "--ledger", ledger)
    assert code == 0
    assert rep["status"] == "pass"
    assert rep["ledger_exponents"] == [1, 1]
    assert rep["product_degrees"] == [3, 6]
    assert rep["colon_table"]["ok"] is True
    assert all(row["dim"] == 0 and row["passed"]
               for row in rep["colon_table"]["rows"])
    assert [t["i"] for t in rep["koszul_tables"]] == [1, 2]
    assert all(t["ok"] for t in rep["koszul_tables"])


def test_corollaries_trivial4_chain(capsys, specs, tmp_path):
    ledger = tmp_path / "ledger.json"
    run_cli(capsys, "verify-loc", specs / "trivial4.json", "--j", "all",
            "--ledger", ledger)
    code, rep, _ = run_cli(capsys, "verify-corollaries",
                           specs / "trivial4.json", "--ledger", ledger)
    assert code == 0
    assert rep["status"] == "pass"
    assert rep["product_degrees"] == [15, 30, 45, 60]
    assert rep["target_degrees"] == [0, 2]
    assert all(t["ok"] for t in rep["koszul_tables"])


def test_corollaries_missing_ledger(capsys, specs, tmp_path):
    code, rep, _ = run_cli(capsys, "verify-corollaries",
                           specs / "transvection.json",
                           "--ledger", tmp_path / "none.json")
    assert code == 2
    assert "run verify-loc" in rep["error"]["message"]


def test_corollaries_incomplete_ledger(capsys, specs, tmp_path):
    ledger = tmp_path / "ledger.json"
    ledger.write_text(json.dumps({"s": D20_TEXT, "d": 2,
                                  "exponents": {"0": 1}}))
    code, rep, _ = run_cli(capsys, "verify-corollaries",
                           specs / "transvection.json", "--ledger", ledger)
    assert code == 2
    assert "missing exponent a_1" in rep["error"]["message"]


def test_corollaries_require_hsop(capsys, specs, tmp_path):
    ledger = tmp_path / "ledger.json"
    run_cli(capsys, "verify-loc", specs / "trivial2.json", "--j", "all",
            "--ledger", ledger)
    code, rep, _ = run_cli(capsys, "verify-corollaries",
                           specs / "trivial2.json", "--ledger", ledger)
    assert code == 2
    assert "hsop is required" in rep["error"]["message"]


def test_corollaries_reject_non_hsop(capsys, specs, tmp_path):
    ledger = tmp_path / "ledger.json"
    run_cli(capsys, "verify-loc", specs / "transvection.json", "--j", "all",
            "--ledger", ledger)
    bad = tmp_path / "bad_hsop.json"
    bad.write_text(json.dumps(["x1", "x1^2"]))
    code, rep, _ = run_cli(capsys, "verify-corollaries",
                           specs / "transvection.json", "--ledger", ledger,
                           "--hsop", bad)
    assert code == 2
    assert "unvalidated hsop" in rep["error"]["message"]


def test_corollaries_failing_row_exit_code(capsys, specs, tmp_path,
                                           monkeypatch):
    ledger = tmp_path / "ledger.json"
    run_cli(capsys, "verify-loc", specs / "transvection.json", "--j", "all",
            "--ledger", ledger)

    def fake_check(q, targets, window):
        return AnnihilationReport(q, window,
                                  [("colon(t=1)", 0, 1, False)], [])
    monkeypatch.setattr(cli, "annihilation_check_koszul", fake_check)
    code, rep, _ = run_cli(capsys, "verify-corollaries",
                           specs / "transvection.json", "--ledger", ledger)
    assert code == 1
    assert rep["status"] == "fail"
    assert rep["colon_table"]["rows"][0]["passed"] is False


# ------------------------------------------------------------ entry point


def test_module_entry_point(specs):
    proc = subprocess.run(
        [sys.executable, "-m", "modinv", "invariants",
         str(specs / "trivial2.json"), "--max-degree", "1"],
        capture_output=True, text=True)
    assert proc.returncode == 0
    rep = json.loads(proc.stdout)
    assert rep["schema_version"] == 1
    assert rep["command"] == "invariants"
