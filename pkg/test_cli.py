#!/usr/bin/env python3
"""
Tests for the command line: JSON lines on stdout, exit codes, scans
"""
import json

import pytest

from tnsd import main as cli
from tnsd.errors import InternalInconsistencyError
from tnsd.main import main


def _lines(capsys):
    out = capsys.readouterr().out
    return [json.loads(line) for line in out.splitlines() if line.strip()]


@pytest.fixture(autouse=True)
def _quiet_env(monkeypatch, tmp_path):
    monkeypatch.setenv("TNSD_ARCHIVE_DIR", str(tmp_path / "archive"))
    monkeypatch.setenv("TNSD_THREADS", "1")
    monkeypatch.delenv("TNSD_VERBOSE", raising=False)


def test_mad_of_petersen(capsys):
    assert main(["mad", "--named", "petersen"]) == 0
    (record,) = _lines(capsys)
    assert record["value"] == "3/1"
    assert record["below_threshold"] is True


def test_girth_of_a_star_is_infinite(capsys):
    assert main(["girth", "--named", "K1,4"]) == 0
    assert _lines(capsys)[0]["value"] == "inf"


def test_graph6_file_input(tmp_path, capsys):
    path = tmp_path / "graphs.g6"
    path.write_text("D?{\nA_\n")
    assert main(["mad", str(path)]) == 0
    assert [r["value"] for r in _lines(capsys)] == ["8/5", "1/1"]


def test_edge_list_input(tmp_path, capsys):
    path = tmp_path / "p3.txt"
    path.write_text("0 1\n1 2\n")
    assert main(["solve", str(path)]) == 0
    record = _lines(capsys)[0]
    assert record["index"] == 3
    assert record["exact"] is True


def test_solve_with_fixed_k(capsys):
    assert main(["solve", "--named", "K1,3", "--k", "3"]) == 1
    assert _lines(capsys)[0]["status"] == "infeasible"
    assert main(["solve", "--named", "K1,3", "--k", "4"]) == 0
    assert _lines(capsys)[0]["status"] == "found"


def test_check_a_colouring(tmp_path, capsys):
    colouring = tmp_path / "c.json"
    colouring.write_text(json.dumps({"k": 3, "vertex_colours": [2, 1, 3], "edge_colours": [[0, 1, 3], [1, 2, 2]]}))
    assert main(["check", "--named", "P3", "--colouring", str(colouring)]) == 0
    assert _lines(capsys)[0]["tnsd"] is True
    colouring.write_text(json.dumps({"k": 3, "vertex_colours": [1, 1, 1], "edge_colours": []}))
    assert main(["check", "--named", "P3", "--colouring", str(colouring)]) == 1


def test_verify_cn_builtin(capsys):
    assert main(["verify-cn"]) == 0
    records = _lines(capsys)
    assert len(records) == 6
    assert all(r["ok"] for r in records)


def test_verify_cn_custom_factors(tmp_path, capsys):
    factors = tmp_path / "square.txt"
    factors.write_text("1 -1 0 ^ 2\n")
    assert main(["verify-cn", "--factors", str(factors), "--target", "1 1", "--expected", "-2"]) == 0
    assert _lines(capsys)[0]["computed"] == -2
    assert main(["verify-cn", "--factors", str(factors), "--target", "1 1", "--expected", "2"]) == 1
    assert main(["verify-cn", "--factors", str(factors), "--target", "1 1"]) == 2


def test_verify_lemma_lists(capsys):
    assert main(["verify-lemma", "--lists", "[[1, 2], [1, 2]]"]) == 0
    record = _lines(capsys)[0]
    assert (record["distinct_sums"], record["bound"], record["tight"]) == (1, 1, True)
    assert main(["verify-lemma", "--lists", "[[1], [1, 2]]"]) == 2
    assert main(["verify-lemma", "--lists", "not json"]) == 2


def test_verify_lemma_exhaustive(capsys):
    assert main(["verify-lemma", "--exhaustive", "2", "--max-value", "5"]) == 0
    assert _lines(capsys)[0]["violations"] == []


def test_detect_and_discharge(capsys):
    assert main(["detect", "--named", "K1,8"]) == 0
    summary = _lines(capsys)[-1]
    assert summary["reducible"]["kind"] == "Lemma8Violation"
    assert main(["discharge", "--named", "K6", "--audit"]) == 0
    ledger, audit = _lines(capsys)
    assert ledger["conserved"] is True
    assert ledger["final"]["0"] == "1/3"
    assert audit["ok"] is True


def test_prove(capsys):
    assert main(["prove", "--named", "K1,8"]) == 0
    record = _lines(capsys)[0]
    assert record["status"] == "coloured"
    assert record["palette"] == 11
    assert main(["prove", "--named", "K6", "--no-fallback"]) == 1
    assert _lines(capsys)[0]["status"] == "hypothesis-not-met"


def test_internal_inconsistency_is_archived(monkeypatch, tmp_path):
    def broken(*args, **kwargs):
        raise InternalInconsistencyError("boom", {"where": "test"})

    monkeypatch.setattr(cli, "recursive_colour", broken)
    assert main(["prove", "--named", "P3"]) == 3
    archived = list((tmp_path / "archive").glob("inconsistent-*.json"))
    assert len(archived) == 1
    assert json.loads(archived[0].read_text())["context"] == {"where": "test"}


def test_usage_errors(tmp_path):
    assert main(["solve"]) == 2
    assert main(["mad", str(tmp_path / "missing.g6")]) == 2
    assert main(["mad", "--named", "Q7"]) == 2
    bad = tmp_path / "bad.g6"
    bad.write_text("D? \n")
    assert main(["mad", str(bad)]) == 2
    with pytest.raises(SystemExit) as e:
        main(["colour-everything"])
    assert e.value.code == 2


def test_scan_exhaustive_solve(capsys):
    assert main(["scan", "--exhaustive", "4", "--action", "solve", "--k-auto"]) == 0
    records = _lines(capsys)
    summary = records[-1]
    assert summary["ok"] is True
    # connected graphs on 1..4 vertices: 1 + 1 + 2 + 6
    assert summary["instances"] == 10
    assert all(r["outcome"] == "pass" for r in records[:-1])


def test_scan_from_config_file(tmp_path, capsys):
    config = tmp_path / "scan.env"
    config.write_text("EXHAUSTIVE=3\nACTION=discharge\n")
    assert main(["scan", "--config", str(config)]) == 0
    assert _lines(capsys)[-1]["instances"] == 4


def test_scan_random_prove(capsys):
    assert main(["scan", "--random", "5", "--seed", "2", "--max-n", "20", "--action", "prove"]) == 0
    summary = _lines(capsys)[-1]
    assert summary["summary"]["pass"] == 5


def test_scan_solve_palette_follows_k(capsys):
    assert main(["scan", "--exhaustive", "3", "--action", "solve", "--k", "8"]) == 0
    records = _lines(capsys)[:-1]
    assert {r["detail"]["palette"] for r in records} == {11}

    assert main(["scan", "--exhaustive", "3", "--action", "solve", "--palette", "5"]) == 0
    records = _lines(capsys)[:-1]
    assert {r["detail"]["palette"] for r in records} == {5}

    assert main(["scan", "--exhaustive", "3", "--action", "solve", "--k-auto"]) == 0
    palettes = [r["detail"]["palette"] for r in _lines(capsys)[:-1]]
    assert sorted(palettes) == [3, 4, 5, 5]
    assert main(["scan", "--exhaustive", "3", "--action", "solve", "--palette", "0"]) == 2


def test_seeded_scans_are_reproducible(capsys):
    args = ["scan", "--random", "6", "--seed", "9", "--max-n", "25", "--action", "detect"]
    assert main(args) == 0
    first = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == first
    assert first.count("\n") == 7


def test_scan_needs_one_source():
    assert main(["scan", "--action", "solve"]) == 2
    assert main(["scan", "--exhaustive", "3", "--random", "2"]) == 2


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
