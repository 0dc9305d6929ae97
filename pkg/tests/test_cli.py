import json
import subprocess
import sys

import pytest

from semiunion.certs import builtin_table
from semiunion.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    return code, json.loads(out)


def test_classify_two_copies(capsys):
    code, report = run_json(capsys, "classify", "--copies", "2", "--exp-bound", "4")
    assert code == 0 and report["version"] == 1
    assert report["invocation"]["exp_bound"] == 4 and report["invocation"]["copies"] == 2
    res = report["result"]
    assert res["retained"] == ["aa", "ab"] and res["errors"] == []
    fams = {o["type"]: {s["family"] for s in o["phase2"]["survivors"]} for o in res["orbits"]}
    assert fams == {"aa": {"2-i"}, "ab": {"2-ii"}}


def test_orbits(capsys):
    code, report = run_json(capsys, "orbits")
    assert code == 0
    res = report["result"]
    assert (res["types"], res["group_order"], res["orbits"], res["burnside"]["orbits"]) == (729, 12, 74, 74)


def test_orbits_text(capsys):
    code, out, _ = run(capsys, "orbits", "--copies", "2")
    assert code == 0 and out.startswith("4 types, group of order 4: 2 orbits")


def test_verify_vii(capsys):
    code, report = run_json(capsys, "verify", "--family", "3-vii")
    assert code == 0
    res = report["result"]
    assert res["verified"] is True
    assert res["presentation"] == "letters a b c; ab=b^2; ba=a^2; ac=c^2; ca=b^2; bc=c^2; cb=a^2"


def test_verify_constraint_violation_exits_2(capsys):
    code, out, err = run(capsys, "verify", "--family", "3-i", "--params", "i=1,j=1,k=3")
    assert code == 2 and "i+j = k+2" in err and out == ""


def test_verify_corrupted_table_exits_1(capsys, tmp_path):
    bad = builtin_table("3-ii").with_entry(1, 2, 2)
    path = tmp_path / "bad.txt"
    path.write_text(bad.render())
    code, out, _ = run(capsys, "verify", "--family", "3-ii", "--params", "i=2,j=2,k=2", "--table", str(path))
    assert code == 1 and "NOT VERIFIED" in out


def test_verify_unreadable_table_exits_2(capsys, tmp_path):
    path = tmp_path / "broken.txt"
    path.write_text("elements x\nmap a=q\nx\n")
    code, _, err = run(capsys, "verify", "--family", "3-ii", "--params", "i=2,j=2,k=2", "--table", str(path))
    assert code == 2 and "error" in err


def test_normalize(capsys):
    code, report = run_json(capsys, "normalize", "--type", "bacbca")
    assert code == 0
    assert report["result"]["canonical"] == "abbcac" and report["result"]["family"] == "3-vii"


def test_normalize_bad_type_exits_2(capsys):
    assert run(capsys, "normalize", "--type", "abc")[0] == 2


def test_consequence_from_file(capsys, tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("letters a b c\nab=a^2\nba=a^2\nac=a^2\nca=a^2\nbc=a^2\ncb=a^2\n")
    code, out, _ = run(capsys, "consequence", "--presentation", str(path), "--from", "abca", "--to", "a^4")
    assert code == 0 and "derivable" in out


def test_consequence_unknown_exits_1(capsys):
    code, report = run_json(capsys, "consequence", "--family", "2-ii", "--from", "bb", "--to", "aa", "--length", "8")
    assert code == 1 and report["result"]["verdict"] == "unknown-within-bounds"


def test_ball(capsys):
    code, report = run_json(capsys, "ball", "--family", "3-i", "--params", "i=2,j=2,k=2", "--length", "4")
    assert code == 0
    assert report["result"]["class_count"] == 12 and report["result"]["merges"] == []


def test_ball_with_merges_exits_1(capsys, tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("letters a b c; ab=a^2; ba=a^2; ac=a^2; ca=a^2; bc=a^3; cb=a^3")
    code, report = run_json(capsys, "ball", "--presentation", str(path), "--length", "5")
    assert code == 1
    pairs = [(m["left"], m["right"]) for m in report["result"]["merges"]]
    assert (["a", 4], ["a", 5]) in pairs


def test_ball_requires_a_source(capsys):
    assert run(capsys, "ball")[0] == 2


def test_ball_rejects_two_sources(capsys, tmp_path):
    path = tmp_path / "p.txt"
    path.write_text("letters a b; ab=a")
    assert run(capsys, "ball", "--family", "2-ii", "--presentation", str(path))[0] == 2


def test_eliminate_type(capsys):
    code, report = run_json(capsys, "eliminate", "--type", "ccbbaa")
    assert code == 1 and report["result"]["phase1"]["probe"] == "abc"
    code, report = run_json(capsys, "eliminate", "--type", "ab", "--exp-bound", "4")
    assert code == 0 and report["result"]["phase2"]["survivors"] == [[2, 2]]


def test_eliminate_presentation(capsys):
    code, report = run_json(capsys, "eliminate", "--family", "2-ii")
    assert code == 0 and report["result"]["contradiction"] is None


def test_bad_flag_exits_2(capsys):
    assert run(capsys, "classify", "--copies", "5")[0] == 2
    assert run(capsys, "classify", "--copies", "2", "--exp-bound", "0")[0] == 2


@pytest.mark.parametrize("argv", [
    ["classify", "--copies", "2", "--exp-bound", "3"],
    ["orbits"],
    ["verify", "--family", "3-ix", "--params", "i=3"],
    ["ball", "--family", "2-ii", "--length", "5"],
])
def test_json_is_byte_identical(argv):
    cmd = [sys.executable, "-m", "semiunion", *argv, "--json"]
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert first == second


def test_classify_output_independent_of_threads(capsys):
    _, one = run_json(capsys, "classify", "--copies", "2", "--exp-bound", "3")
    _, two = run_json(capsys, "classify", "--copies", "2", "--exp-bound", "3", "--threads", "2")
    del one["invocation"]["threads"], two["invocation"]["threads"]
    assert one == two
