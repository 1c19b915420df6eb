import json

import pytest

from rtpl.cli import INCONCLUSIVE, OK, USAGE, VIOLATION, main


@pytest.fixture
def choice_file(tmp_path):
    f = tmp_path / "choice.rtpl"
    f.write_text("a.0 + s.0")
    return str(f)


def test_parse_ok(choice_file, capsys):
    assert main(["parse", choice_file]) == OK
    assert capsys.readouterr().out.strip() == "a.0 + s.0"


def test_parse_error_exit_code(tmp_path, capsys):
    f = tmp_path / "bad.rtpl"
    f.write_text("")
    assert main(["parse", str(f)]) == USAGE
    f.write_text("a.0 +")
    assert main(["parse", str(f)]) == USAGE


def test_steps_listing(choice_file, capsys):
    assert main(["steps", choice_file]) == OK
    out = capsys.readouterr().out
    assert "a[0]" in out and "s[1]" in out and "Cho" in out
    assert "conflict matrix" in out


def test_run_script(choice_file, capsys):
    assert main(["run", choice_file, "--script", "a[1];s[2]"]) == OK
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "a[1].s_[2].0 + s[2].0"
    trace = json.loads(out[1])
    assert [s["act"] for s in trace["steps"]] == ["a", "s"]


def test_run_backward_script(choice_file, capsys):
    assert main(["run", choice_file, "--script", "a[1];s[2];~s[2];~a[1]"]) == OK
    assert capsys.readouterr().out.splitlines()[0] == "a.0 + s.0"


def test_run_bare_action_must_be_unique(tmp_path, capsys):
    f = tmp_path / "two.rtpl"
    f.write_text("a.0 | a.0")
    assert main(["run", str(f), "--script", "a"]) == USAGE
    f2 = tmp_path / "one.rtpl"
    f2.write_text("a.0")
    assert main(["run", str(f2), "--script", "a"]) == OK


def test_check_single_file(choice_file, capsys, tmp_path):
    out_file = tmp_path / "report.json"
    rc = main(["check", choice_file, "--suite", "loop", "--depth", "4",
               "--out", str(out_file)])
    assert rc == OK
    report = json.loads(out_file.read_text())
    assert report["reports"][0]["check"] == "loop"
    assert report["reports"][0]["violations"] == []


def test_check_mutation_detects_violations(tmp_path):
    f = tmp_path / "ghost.rtpl"
    f.write_text("s.a.0 | b.s.0")
    assert main(["check", str(f), "--suite", "loop", "--depth", "4",
                 "--no-ghosts"]) == VIOLATION
    assert main(["check", str(f), "--suite", "order", "--depth", "4",
                 "--no-ghosts"]) == VIOLATION


def test_check_directory(tmp_path):
    (tmp_path / "one.rtpl").write_text("a.0")
    (tmp_path / "two.rtpl").write_text("[a.0](b.0)")
    assert main(["check", str(tmp_path), "--suite", "square",
                 "--depth", "3"]) == OK


def test_examples_pass(capsys):
    assert main(["examples"]) == OK
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.count("PASS") >= 10
