import json
from pathlib import Path

import pytest

from incontest.cli import main

FIX = Path(__file__).resolve().parent.parent / "src" / "incontest" / "fixtures"


def inst(name):
    return str(FIX / f"{name}.json")


def run_json(capsys, argv):
    code = main(argv)
    out = capsys.readouterr().out
    return code, (json.loads(out) if out.strip().startswith("{") else out)


def test_solve_boston(capsys):
    code, out = run_json(capsys, ["solve", "-i", inst("t2"), "-m", "boston"])
    assert code == 0
    assert out["seats"] == {"i1": "s1", "i2": "s3", "i3": "s2"}


def test_solve_ettc_with_trace(capsys):
    code, out = run_json(capsys, ["solve", "-i", inst("t4"), "-m", "ettc", "--trace"])
    assert code == 0
    assert out["seats"]["i4"] == "s3"
    assert out["trace"] and {"event", "round", "student", "school"} <= set(out["trace"][0])


def test_solve_table_to_file(tmp_path, capsys):
    dest = tmp_path / "out.txt"
    assert main(["solve", "-i", inst("t3"), "-m", "ar:2", "--format", "table", "-o", str(dest)]) == 0
    assert capsys.readouterr().out == ""
    lines = dest.read_text().splitlines()
    assert lines[0].split() == ["student", "seat"]
    assert "i3       self" in lines


def test_audit_exit_codes(capsys):
    assert main(["audit", "-i", inst("t2"), "-a", inst("t2_boston")]) == 1
    report = json.loads(capsys.readouterr().out)
    assert report["complaints"] == [
        {"student": "i2", "kind": "top_priority_violation", "witness": ["s1", "s2"]}
    ]
    assert main(["audit", "-i", inst("t1"), "-a", inst("t1_mu_star")]) == 0


def test_attainable(capsys):
    code, out = run_json(capsys, ["attainable", "-i", inst("t4"), "-m", "ttc", "--student", "i4"])
    assert code == 0 and out["agree"]
    assert out["attainable"]["outcomes"] == ["s1", "s2"]


def test_strategy(capsys):
    code = main(["strategy", "-i", inst("t2"), "--student", "i3", "-k", "2", "--safe", "--format", "table"])
    assert code == 0
    assert capsys.readouterr().out.strip() == "no safe strategy"
    code, out = run_json(capsys, ["strategy", "-i", inst("t2"), "--student", "i2", "-k", "2"])
    assert code == 0
    assert out["safe"]["exists"] and out["dominant"]["strategy"] == ["s1", "s2"]
    assert out["maxmin"]["passed"]


def test_consistency(capsys):
    assert main(["consistency", "-m", "sosm", "--format", "table"]) == 0
    assert "contestable outcomes 0" in capsys.readouterr().out
    assert main(["consistency", "-m", "boston", "--frames", "3"]) == 1
    assert main(["consistency", "-m", "ttc", "-i", inst("t1"), "-i", inst("t2")]) == 0


def test_gen_is_deterministic(tmp_path, capsys):
    argv = ["gen", "--students", "5", "--schools", "3", "--seed", "9"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first
    dest = tmp_path / "g.json"
    assert main(argv + ["-o", str(dest)]) == 0
    assert dest.read_text() == first
    assert main(["solve", "-i", str(dest), "-m", "sosm"]) == 0


@pytest.mark.parametrize(
    "argv, code",
    [
        (["solve", "-i", "t2", "-m", "lottery"], 3),
        (["solve", "-i", "t2", "-m", "ar:0"], 3),
        (["solve", "-i", "missing.json", "-m", "sosm"], 2),
        (["attainable", "-i", "t2", "-m", "sosm", "--student", "nobody"], 2),
        (["solve", "-i", "t2", "-m", "sosm@k=1"], 2),
        (["attainable", "-i", "t2", "-m", "sosm", "--student", "i1", "--budget", "5"], 4),
    ],
)
def test_exit_codes(argv, code, capsys):
    argv = [inst(a) if a == "t2" else a for a in argv]
    assert main(argv) == code
    assert capsys.readouterr().err.startswith("error:")


def test_invalid_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["solve", "-i", str(bad), "-m", "sosm"]) == 2
    bad.write_text(json.dumps({"students": ["a", "a"], "schools": [], "capacities": {},
                               "preferences": {}, "priorities": {}}))
    assert main(["solve", "-i", str(bad), "-m", "sosm"]) == 2
