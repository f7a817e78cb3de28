import json
import os

from jcore.cli import main
from jcore.corpus import CORPUS_DIR


def _c(path):
    return os.path.join(CORPUS_DIR, path)


def test_check_accepts_corpus(capsys):
    assert main(["check", _c("observer_v1.jcore")]) == 0
    assert "ok" in capsys.readouterr().out


def test_check_reports_parse_error(tmp_path, capsys):
    bad = tmp_path / "bad.jcore"
    bad.write_text("class C extends { }")
    assert main(["check", str(bad)]) == 1


def test_analyze_rejects_bad(capsys):
    code = main(["analyze", "--own", "OBool", "--rep", "Bool", _c("obool_bad_v1.jcore")])
    out = capsys.readouterr().out
    assert code == 1
    assert "OwnerPublicReturnsRep" in out


def test_analyze_json_lines(capsys):
    code = main(["--format", "json", "analyze", "--own", "OBool", "--rep", "Bool", _c("obool_bad_v1.jcore")])
    lines = [json.loads(l) for l in capsys.readouterr().out.splitlines()]
    assert code == 1
    assert lines[0]["ok"] is False
    diag = lines[1]
    assert diag["rule"] == "OwnerPublicReturnsRep"
    assert diag["class"] == "OBool"
    assert diag["file"].endswith("obool_bad_v1.jcore")
    assert diag["span"] and diag["message"]


def test_analyze_requires_designations(capsys):
    assert main(["analyze", _c("observer_v1.jcore")]) == 2


def test_run_text_and_json(capsys):
    code = main(["run", "--entry", "Main.main", _c("observer_v1.jcore")])
    out = capsys.readouterr().out
    assert code == 0
    assert "ok at fuel 2" in out
    assert "count = 1" in out
    code = main(["--format", "json", "run", "--entry", "Main.main", _c("observer_v1.jcore")])
    data = json.loads(capsys.readouterr().out)
    assert data["outcome"] == "ok" and data["fuel"] == 2
    assert "count = 1" in data["state"]


def test_run_monitor_flags_leak(capsys):
    code = main([
        "run", "--entry", "Main.main", "--own", "OBool", "--rep", "Bool",
        "--monitor", "every", _c("obool_bad_leak.jcore"),
    ])
    out = capsys.readouterr().out
    assert code == 1
    assert "ClientToRep" in out


def test_run_abort_reported(capsys):
    code = main(["run", "--entry", "Main.main", _c("meyer_sieber_v1.jcore")])
    out = capsys.readouterr().out
    assert code == 0  # aborting is a valid outcome, not a diagnostic
    assert "explicit-abort" in out


def test_equiv_exit_codes(capsys):
    assert main(["equiv", _c("manifests/observer_v1_sentinel.json")]) == 0
    assert "equivalent" in capsys.readouterr().out
    assert main(["equiv", _c("manifests/obool_bad_pair.json")]) == 1
    assert "distinguished" in capsys.readouterr().out


def test_equiv_json(capsys):
    main(["--format", "json", "equiv", _c("manifests/observer_version_pair.json")])
    data = json.loads(capsys.readouterr().out)
    assert data["verdict"] == "equivalent"
    assert data["sigma"]


def test_simtest_cli(capsys):
    assert main(["simtest", _c("manifests/sim_meyer.json")]) == 0
    out = capsys.readouterr().out
    assert "all pass" in out and "callP" in out
    assert main(["simtest", _c("manifests/sim_obool_bad.json")]) == 1
    out = capsys.readouterr().out
    assert "counterexample" in out


def test_dot_golden(capsys, tmp_path):
    golden = os.path.join(os.path.dirname(__file__), "goldens", "observer_v1_final.dot")
    out_path = tmp_path / "out.dot"
    code = main([
        "dot", "--entry", "Main.main", "--own", "Observable", "--rep", "Node",
        "-o", str(out_path), _c("observer_v1.jcore"),
    ])
    assert code == 0
    with open(golden) as f:
        assert out_path.read_text() == f.read()


def test_usage_error_exit_2(capsys):
    assert main(["run", _c("observer_v1.jcore")]) == 2  # missing --entry
    assert main(["nonsense"]) == 2


def test_missing_file_exit_2(capsys):
    assert main(["equiv", "/nonexistent/manifest.json"]) == 2


def test_corpus_list_and_run_all(capsys):
    assert main(["corpus", "list"]) == 0
    out = capsys.readouterr().out
    assert "observer_v1" in out
    assert main(["corpus", "run-all"]) == 0
    out = capsys.readouterr().out
    assert "0 failures" in out


def test_run_trace(capsys):
    code = main(["run", "--entry", "Main.main", "--trace", _c("bool_v1.jcore")])
    out = capsys.readouterr().out
    assert code == 0
    traces = [l for l in out.splitlines() if l.startswith("trace: ")]
    assert traces
    assert any("NewAssign" in t for t in traces)
    assert all("@" in t for t in traces)


def test_corpus_list_extra_dir(tmp_path, capsys):
    (tmp_path / "mine.jcore").write_text("class C extends Object { }")
    assert main(["corpus", "list", "--extra", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "mine" in out and "observer_v1" in out
    assert main(["corpus", "list", "--extra", str(tmp_path / "missing")]) == 2
