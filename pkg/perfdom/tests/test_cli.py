# tests/test_cli.py
import json

import pytest

from perfdom.board import parse_placement
from perfdom.cli import ClaimStatus, ReproduceEntry, ReproduceReport, main, reproduce
from perfdom.errors import BoardInputError
from perfdom.exact_solver import cache_clear
from perfdom.patterns import construct_4rows


def setup_function():
    cache_clear()


def _run_json(capsys, argv):
    code = main(argv + ["--json"])
    return code, json.loads(capsys.readouterr().out)


def test_solve_json(capsys):
    code, payload = _run_json(capsys, ["solve", "4", "4"])
    assert code == 0
    assert payload["format_version"] == 1
    assert payload["gamma_p"] == 8
    assert payload["only_trivial"] is False


def test_solve_text(capsys):
    assert main(["solve", "3", "3"]) == 0
    assert "= 5" in capsys.readouterr().out


def test_bad_dimensions_exit_one(capsys):
    assert main(["solve", "0", "4"]) == 1
    assert "Error:" in capsys.readouterr().err


def test_resource_guard_exit_two(capsys):
    assert main(["solve", "9", "9"]) == 2
    assert "Resource limit" in capsys.readouterr().err


def test_verify_fixture(capsys, fixtures_dir):
    assert main(["verify", str(fixtures_dir / "kn_14x4.txt")]) == 0
    out = capsys.readouterr().out
    assert "perfect: true" in out


def test_verify_missing_file(capsys, tmp_path):
    assert main(["verify", str(tmp_path / "nope.txt")]) == 1


def test_verify_reports_violations(capsys, tmp_path):
    f = tmp_path / "p.txt"
    f.write_text("3 3\n...\n...\nN..\n")
    code, payload = _run_json(capsys, ["verify", str(f)])
    assert code == 0
    assert payload["perfect"] is False
    assert payload["size"] == 1


def test_enumerate_canonical(capsys):
    code, payload = _run_json(capsys, ["enumerate", "14", "4", "--max-size", "28", "--canonical"])
    assert code == 0
    assert payload["count"] == 1


def test_complete_fixture(capsys, fixtures_dir):
    code, payload = _run_json(capsys, ["complete", "--constraints", str(fixtures_dir / "case1_constraints.txt")])
    assert code == 0
    assert payload["verdict"] == "no-nontrivial"


def test_band_rows(capsys):
    code, payload = _run_json(capsys, ["band", "--rows", "2"])
    assert code == 0
    assert payload["min_density"] == "1/3"


def test_band_classify_all_includes_window_verdict(capsys):
    code, payload = _run_json(capsys, ["band", "--classify-all", "--max-band-rows", "2", "--kmax", "4"])
    assert code == 0
    plane = next(b for b in payload["boards"] if b["board"] == "KN_{Z,Z}")
    assert "isolated knight at radius 6: unsat" in plane["evidence"]


def test_band_needs_a_mode(capsys):
    assert main(["band"]) == 1


def test_pattern_grid_round_trip(capsys):
    assert main(["pattern", "--family", "4rows", "--n", "6", "--grid"]) == 0
    assert parse_placement(capsys.readouterr().out) == construct_4rows(6)


def test_pattern_open_residue(capsys):
    assert main(["pattern", "--family", "3rows", "--n", "9"]) == 1
    assert "open" in capsys.readouterr().err


def test_pattern_zz(capsys):
    code, payload = _run_json(capsys, ["pattern", "--family", "zz"])
    assert code == 0
    assert payload["density"] == "1/8"


def test_window_isolated(capsys):
    code, payload = _run_json(capsys, ["window", "--radius", "2"])
    assert code == 0
    assert payload["verdict"] == "sat"


def test_window_pins_file(capsys, fixtures_dir):
    code, payload = _run_json(capsys, ["window", "--radius", "3", "--pins", str(fixtures_dir / "case3a_pins.txt")])
    assert code == 0
    assert payload["radius"] == 3


def test_reproduce_two_rows(capsys, tmp_path):
    csv = tmp_path / "report.csv"
    assert main(["reproduce", "--scope", "2rows", "--csv", str(csv)]) == 0
    out = capsys.readouterr().out
    assert out.startswith("| claim |")
    assert "mismatch" not in out
    assert csv.read_text().startswith("claim_id,")


def test_reproduce_unknown_scope():
    with pytest.raises(BoardInputError):
        reproduce("5rows")


def test_report_counts_mismatches():
    report = ReproduceReport(entries=[
        ReproduceEntry(claim_id="a", statement="s", computed="1", expected="1", status=ClaimStatus.MATCH),
        ReproduceEntry(claim_id="b", statement="s", computed="2", expected="1", status=ClaimStatus.MISMATCH),
    ])
    assert [e.claim_id for e in report.mismatches] == ["b"]
    assert "match: 1" in report.to_markdown()
    assert list(report.to_frame()["status"]) == ["match", "mismatch"]
    assert report.to_json()["entries"][1]["status"] == "mismatch"


@pytest.mark.slow
def test_reproduce_all_scopes(capsys):
    report = reproduce("all", threads=2)
    assert report.mismatches == []
    assert set(report.elapsed) == {"thm5x5", "2rows", "3rows", "open-3rows", "4rows", "bands", "zz"}
