import io
import json

import pytest

from stratvar import theorems
from stratvar.cli import run


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def test_variance_json():
    code, out, _ = call("variance", "--sizes", "5,5", "--reds", "2,2", "--alloc", "2,2",
                        "--kind", "strat-without", "--format", "json")
    assert code == 0
    assert '"exact":"9/200"' in out
    assert json.loads(out)["decimal"] == 0.045


def test_variance_rational_and_csv():
    code, out, _ = call("variance", "--sizes", "2,5", "--reds", "1/2,1/2", "--alloc", "2,4",
                        "--kind", "strat-without", "--format", "csv")
    assert code == 0
    header, row = out.strip().splitlines()
    assert header == "sizes,reds,alloc,kind,exact,decimal"
    assert "25/3136" in row


@pytest.mark.parametrize("cmd, extra", [
    ("variance", []),
    ("decompose", []),
    ("simulate", ["--trials", "500", "--seed", "3"]),
])
@pytest.mark.parametrize("fmt", ["json", "table", "csv"])
def test_file_and_flags_identical(tmp_path, cmd, extra, fmt):
    path = tmp_path / "sc.json"
    path.write_text(json.dumps({"sizes": [5, 5], "reds": [1, 3], "alloc": [2, 2]}))
    a = call(cmd, "--sizes", "5,5", "--reds", "1,3", "--alloc", "2,2", "--format", fmt, *extra)
    b = call(cmd, "--scenario", str(path), "--format", fmt, *extra)
    assert a[0] == b[0] == 0
    assert a[1] == b[1]


def test_rational_scenario_file(tmp_path):
    path = tmp_path / "sc.json"
    path.write_text(json.dumps({"sizes": [2, 5], "reds": ["1/2", "1/2"], "alloc": [2, 4]}))
    code, out, _ = call("variance", "--scenario", str(path), "--kind", "strat-without", "--format", "json")
    assert code == 0 and json.loads(out)["exact"] == "25/3136"
    assert json.loads(out)["inputs"]["reds"] == ["1/2", "1/2"]


@pytest.mark.parametrize("argv", [
    ["variance", "--sizes", "5,5", "--reds", "2,2", "--alloc", "2,2", "--format", "json"],
    ["minimax", "--sizes", "4,6", "--n", "5", "--R", "5", "--format", "json"],
    ["worst-nature", "--sizes", "4,6", "--alloc", "2,3", "--R", "5", "--format", "json"],
    ["best-alloc", "--sizes", "5,5", "--reds", "0,4", "--n", "4", "--format", "json"],
    ["theorems", "--id", "4", "--max-stratum", "3", "--format", "json"],
    ["simulate", "--sizes", "5,5", "--reds", "2,2", "--alloc", "2,2", "--trials", "100", "--format", "json"],
])
def test_json_round_trip(argv):
    code, out, _ = call(*argv)
    assert code == 0
    assert json.dumps(json.loads(out), sort_keys=True, separators=(",", ":")) + "\n" == out


def test_theorems_exit_zero():
    code, out, _ = call("theorems", "--id", "2", "--max-N", "8", "--max-m", "3")
    assert code == 0
    assert "theorem 2: holds, 0 failures" in out


def test_theorem_failure_exit_two(monkeypatch):
    def broken(rep, rg):
        rep.fail({"why": "forced"})

    monkeypatch.setitem(theorems._CHECKERS, "2", broken)
    code, out, _ = call("theorems", "--id", "2")
    assert code == 2
    assert "fails" in out


def test_minimax_sandwich():
    code, out, _ = call("minimax", "--sizes", "4,6", "--n", "5", "--R", "5", "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["lower_bound"]["exact"] == "1/32"
    assert doc["upper_bound"]["exact"] == "47/1500"
    assert doc["sandwich_holds"] is True
    assert doc["class"] == "admissible"


def test_best_alloc_default_class():
    code, out, _ = call("best-alloc", "--sizes", "5,5", "--reds", "0,4", "--n", "4", "--format", "json")
    doc = json.loads(out)
    assert doc["allocation"] == [1, 3] and doc["class"] == "all"


def test_worst_nature_relaxed():
    code, out, _ = call("worst-nature", "--sizes", "5,5", "--alloc", "2,2", "--R", "4", "--format", "json")
    doc = json.loads(out)
    assert doc["value"]["exact"] == "9/200" and doc["distribution"] == [2, 2]
    assert doc["relaxed_max"]["exact"] == "9/200"


@pytest.mark.parametrize("argv, fragment", [
    (["variance", "--sizes", "5,1", "--reds", "1,1", "--alloc", "1,1"], "stratum 1 has size < 2"),
    (["variance", "--bogus"], "unrecognized"),
    (["variance", "--sizes", "5,5", "--reds", "1,1"], "missing --alloc"),
    (["decompose", "--sizes", "5,5", "--reds", "1,3", "--alloc", "1,3"], "not proportional"),
    (["worst-nature", "--sizes", "9,9,9", "--alloc", "2,2,2", "--R", "13", "--cap", "10"], "exceeds cap"),
    (["sweep", "--max-N", "12", "--max-m", "3", "--cap", "100"], "exceeds cap"),
    (["theorems", "--id", "9"], "invalid choice"),
    (["variance", "--scenario", "/nonexistent.json"], "cannot read"),
])
def test_errors_exit_one(argv, fragment):
    code, out, err = call(*argv)
    assert code == 1
    assert out == ""
    assert fragment in err


def test_cap_from_environment(monkeypatch):
    monkeypatch.setenv("STRATVAR_MAX_ENUM", "10")
    argv = ["worst-nature", "--sizes", "9,9,9", "--alloc", "2,2,2", "--R", "13"]
    assert call(*argv)[0] == 1
    assert call(*argv, "--cap", "100000")[0] == 0


def test_sweep_csv():
    code, out, _ = call("sweep", "--max-N", "4", "--kind", "strat-without")
    lines = out.strip().splitlines()
    assert code == 0
    assert lines[0] == "sizes,reds,alloc,kind,exact,decimal"
    # sizes (2,2): 4 allocations x 9 red vectors
    assert len(lines) == 1 + 36
