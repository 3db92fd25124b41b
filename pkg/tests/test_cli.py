import json
from importlib import resources

import pytest

from typek import cli


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_lattice_info(capsys):
    code, out, _ = run(capsys, "lattice", "info", "U(2)+E8(-2)")
    data = json.loads(out)
    assert code == 0
    assert data["rank"] == 10 and data["signature"] == [1, 9]
    assert data["discriminant_group"] == [2] * 10


def test_parse_error_exit_code(capsys):
    code, _, err = run(capsys, "lattice", "info", "D3(-1)")
    assert code == 2 and "error" in err


def test_unknown_case_is_usage_error(capsys):
    code, _, _ = run(capsys, "keylemma", "--case", "nope")
    assert code == 2


def test_keylemma_single_case(capsys):
    code, out, _ = run(capsys, "keylemma", "--case", "D10")
    data = json.loads(out)
    assert code == 0
    assert data["details"][0]["lambda_g"] == "U(2)"


def test_form_info(capsys):
    code, out, _ = run(capsys, "form", "info", "u(2)")
    assert code == 0 and json.loads(out)["milgram_signature"] == 0


def test_sample_reports_evidence(capsys):
    code, out, _ = run(capsys, "sample", "--case", "C3", "--trials", "5")
    data = json.loads(out)
    assert code == 0 and data["status"] == "EVIDENCE"


def test_typea_exit_reflects_fixed_point_finding(capsys):
    # D8 with the third torsion subgroup carries a fixed point, so this is FAIL
    code, out, _ = run(capsys, "typea", "verify")
    data = json.loads(out)
    assert code == 1 and data["passing"] == 5


def test_topology(capsys):
    code, out, _ = run(capsys, "topology", "--group", "D10")
    data = json.loads(out)
    assert code == 0 and (data["h11"], data["h21"], data["rho"]) == (3, 3, 3)


def test_verify_all_is_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    cli.main(["verify-all", "--out", str(a), "--trials", "4"])
    cli.main(["verify-all", "--out", str(b), "--trials", "4"])
    assert a.read_bytes() == b.read_bytes()
    summary = json.loads(a.read_text())["summary"]
    assert summary["type_k"] == 8


def test_corrupted_catalog_gives_diff(tmp_path, capsys):
    raw = json.loads(resources.files("typek").joinpath("data/keylemma_cases.json").read_text())
    for c in raw["cases"]:
        if c["name"] == "C1":
            c["expected"] = "U+E8(-2)"
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(raw))
    code, out, _ = run(capsys, "keylemma", "--catalog", str(path))
    data = json.loads(out)
    assert code == 1 and data["status"] == "FAIL"
    bad = [r for r in data["details"] if "diff" in r]
    assert len(bad) == 1 and bad[0]["diff"]["computed"] == "U(2)+E8(-2)"


def test_malformed_catalog_is_usage_error(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, _ = run(capsys, "keylemma", "--catalog", str(path))
    assert code == 2


def test_case_name_takes_precedence_over_group(capsys):
    code, out, _ = run(capsys, "keylemma", "--case", "C2")
    rows = json.loads(out)["details"]
    assert code == 0 and [r["group"] for r in rows] == ["C2xC2"]
