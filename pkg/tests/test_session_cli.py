import json

import pytest

from arcforge.cli import main
from arcforge.session import (Flags, SessionError, fixture_text, list_fixtures, load_session, machine_text,
                              run_fixture, run_session, verify_all)

SMALL = """
[session]
name = "small"
field = "QQ"

[schemes.N]
variables = ["x", "y"]
equations = ["x*y"]

[[tasks]]
id = "prolong"
op = "prolong"
scheme = "N"
poly = "x*y"
m = 1
expect = { prolongations = ["x0*y0", "x0*y1 + x1*y0"] }
provenance = "TRIVIAL"
"""


def test_fixtures_listed():
    names = list_fixtures()
    assert {"double_cover", "node_nilpotent", "cusp_nilpotent", "cusp_discrepancy", "fiber_counts",
            "charp_frobenius", "semicontinuity_monomial"} <= set(names)


def test_verify_all_passes():
    rep = verify_all(Flags())
    assert rep.ok, rep.human()


def test_machine_report_is_deterministic():
    a = machine_text(run_fixture("double_cover").machine())
    b = machine_text(run_fixture("double_cover", Flags(parallel=True)).machine())
    assert a == b
    assert "seconds" not in a
    doc = json.loads(a)
    assert doc["provenance"]["seed"] == 0 and len(doc["provenance"]["input_sha256"]) == 64


def test_small_session_runs():
    rep = run_session(load_session(SMALL))
    assert rep.ok and rep.summary()["passed"] == 1


def test_wrong_expectation_fails():
    rep = run_session(load_session(SMALL.replace('"x0*y0"', '"x0*y0 + 1"')))
    assert not rep.ok
    assert rep.tasks[0]["status"] == "fail"


def test_parse_error_has_position():
    with pytest.raises(SessionError, match=r"line \d+, column \d+"):
        load_session("[session]\nname = = 1\n")


def test_unknown_reference_is_named():
    bad = SMALL.replace('scheme = "N"', 'scheme = "Q"')
    with pytest.raises(SessionError, match="unknown scheme 'Q'"):
        load_session(bad)


def test_expectation_without_provenance_rejected():
    with pytest.raises(SessionError, match="provenance"):
        load_session(SMALL.replace('provenance = "TRIVIAL"\n', ""))


def test_bad_provenance_tag_rejected():
    with pytest.raises(SessionError, match="provenance must be one of"):
        load_session(SMALL.replace('"TRIVIAL"', '"FOLKLORE"'))


def test_unknown_op_rejected():
    with pytest.raises(SessionError, match="unknown op"):
        load_session(SMALL.replace('op = "prolong"', 'op = "resolve"'))


def test_task_errors_are_isolated():
    text = SMALL + """
[[tasks]]
id = "broken"
op = "prolong"
scheme = "N"
poly = "x*"
m = 1

[[tasks]]
id = "after"
op = "prolong"
scheme = "N"
poly = "x"
m = 0
"""
    rep = run_session(load_session(text))
    st = {r["id"]: r["status"] for r in rep.tasks}
    assert st == {"prolong": "pass", "broken": "error", "after": "ok"}
    assert not rep.ok


def test_expect_error():
    text = SMALL + """
[[tasks]]
id = "broken"
op = "prolong"
scheme = "N"
poly = "x*"
m = 1
expect_error = true
provenance = "TRIVIAL"
"""
    assert run_session(load_session(text)).ok


def test_fixture_texts_carry_provenance():
    for name in list_fixtures():
        s = load_session(fixture_text(name))
        for t in s.tasks:
            if "expect" in t:
                assert "provenance" in t


# command line -----------------------------------------------------------------

def test_cli_verify(capsys):
    assert main(["verify", "double_cover"]) == 0
    assert "1/1 fixtures passed" in capsys.readouterr().out


def test_cli_verify_unknown_fixture(capsys):
    assert main(["verify", "nope"]) == 2


def test_cli_run_failure_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.session"
    p.write_text(SMALL.replace('"x0*y0"', '"x0*y0 + 1"'))
    assert main(["run", str(p)]) == 1
    p.write_text(SMALL)
    capsys.readouterr()
    assert main(["run", str(p), "--format", "machine"]) == 0
    assert json.loads(capsys.readouterr().out)["ok"] is True


def test_cli_run_machine_output_file(tmp_path, capsys):
    p = tmp_path / "ok.session"
    p.write_text(SMALL)
    out = tmp_path / "report.json"
    assert main(["run", str(p), "--output", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["ok"] and doc["session"] == "small"


def test_cli_run_parse_error(tmp_path, capsys):
    p = tmp_path / "broken.session"
    p.write_text("[session\n")
    assert main(["run", str(p)]) == 2
    assert "line 1" in capsys.readouterr().err


def test_cli_prolong(capsys):
    assert main(["prolong", "x^2", "--m", "2"]) == 0
    out = capsys.readouterr().out
    assert "f^(2) = 2*x0*x2 + x1^2" in out


def test_cli_ord(capsys):
    assert main(["ord", "x^2 - y^3", "--arc", "x = 0, 0, 0, 1; y = 0, 0, 1", "--format", "machine"]) == 0
    assert json.loads(capsys.readouterr().out) == {"order": "infinite"}
    assert main(["ord", "x^2 - y^3", "--arc", "x = 0, 0, 0, 1; y = 0, 0, 1, 1", "--format", "machine"]) == 0
    assert json.loads(capsys.readouterr().out) == {"order": {"finite": 7}}


def test_cli_fiber_count(capsys):
    assert main(["fiber-count", "--cover", "x^2", "--beta", "0, 0, 1", "--format", "machine"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["count"] == 2 and doc["sepdeg"] == 2 and doc["censored"] is False


def test_cli_mather_weights(capsys):
    assert main(["mather", "--weights", "2,3", "--format", "machine"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["mather"] == 5
