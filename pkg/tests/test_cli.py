import json
import subprocess
import sys

import pytest

from pseudomul.cli import main

SMALL = ["--grid-points", "9", "--grid-random", "4"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def broken(tmp_path):
    p = tmp_path / "broken.odot"
    p.write_text("min(s, u)\n")
    return p


@pytest.fixture
def shilkret_file(tmp_path):
    p = tmp_path / "inst.json"
    p.write_text(json.dumps({"ground": ["a", "b"], "density": {"a": 0.5, "b": 0.25},
                             "f": {"a": 2, "b": 3}, "B": ["a", "b"]}))
    return p


def test_check_times(capsys):
    code, out, _ = run(capsys, "check", "--op", "times")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_check_verbatim_refuted(capsys):
    code, out, _ = run(capsys, "check", "--op", "tanh-phi:2:verbatim")
    assert code == 1
    ann = {a["name"]: a for a in json.loads(out)["axioms"]}["annihilator"]
    assert ann["verdict"] == "refuted"
    assert ["2.0", "0.0"] in [w["args"] for w in ann["witnesses"]]


def test_check_human(capsys):
    code, out, _ = run(capsys, "check", "--op", "tanh-phi:2:verbatim", "--format", "human")
    assert code == 1 and "annihilator" in out and "refuted" in out


def test_broken_op_file(capsys, broken):
    code, out, err = run(capsys, "check", "--op", f"@{broken}")
    assert code == 2 and out == ""
    assert "unknown identifier `u`" in err
    lines = err.splitlines()
    assert lines[-1].index("^") == lines[-2].index("u")


def test_dsl_op_file(capsys, tmp_path):
    p = tmp_path / "op.odot"
    p.write_text("2 * s * t")
    code, out, _ = run(capsys, "classify", "--op", f"@{p}")
    assert code == 0
    assert abs(float(json.loads(out)["identity_used"]) - 0.5) <= 1e-12


@pytest.mark.parametrize("op, cls", [("min", "all"), ("degenerate-right", "only-zero"),
                                     ("times", "up-to"), ("tanh-phi:2", "up-to")])
def test_classify(capsys, op, cls):
    code, out, _ = run(capsys, "classify", "--op", op)
    d = json.loads(out)
    assert code == 0 and d["class"] == cls
    if op == "tanh-phi:2":
        assert abs(float(d["phi"]) - 2) <= 1e-4
    if op == "times":
        assert d["phi"] == "inf"


def test_theorems(capsys):
    code, out, _ = run(capsys, "theorems", "--op", "times")
    assert code == 0 and json.loads(out)["consistent"] is True
    code, out, _ = run(capsys, "theorems", "--op", "tanh-phi:2:verbatim")
    assert code == 1 and json.loads(out)["gate_failed"] == ["annihilator"]


def test_kernel(capsys):
    code, out, _ = run(capsys, "kernel", "--op", "degenerate-right", "--t", "0,1,inf")
    rows = json.loads(out)["kernel"]
    assert code == 0 and [r["O_t"] for r in rows] == ["0.0", "1.0", "inf"]
    code, out, _ = run(capsys, "kernel", "--op", "times", "--t", "5,inf", "--format", "csv")
    assert code == 0 and out == "t,O_t\n5.0,0.0\ninf,inf\n"


def test_kernel_error_exit(capsys):
    code, out, _ = run(capsys, "kernel", "--op", "times", "--t", "-1")
    assert code == 2


def test_integrate(capsys, shilkret_file):
    code, out, _ = run(capsys, "integrate", "--op", "times", "--instance", str(shilkret_file))
    d = json.loads(out)
    assert code == 0 and d["value"] == "1.0" and d["level_set"] == "f >= t"
    code, out, _ = run(capsys, "integrate", "--op", "min", "--instance", str(shilkret_file))
    assert json.loads(out)["value"] == "0.5"
    code, _, _ = run(capsys, "integrate", "--op", "tanh-phi:2:verbatim", "--instance", str(shilkret_file))
    assert code == 1


@pytest.mark.parametrize("argv", [
    ["check", "--op", "times", "--format", "csv"],
    ["check", "--op", "nonsense"],
    ["check", "--op", "times", "--tol", "0"],
    ["check", "--op", "@/nonexistent/file.odot"],
    ["integrate", "--op", "times"],
    ["integrate", "--op", "times", "--instance", "/nonexistent.json"],
    ["frobnicate", "--op", "times"],
    ["check"],
])
def test_usage_errors(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_seed_sources(capsys, monkeypatch):
    monkeypatch.delenv("PSEUDOMUL_SEED", raising=False)
    _, out, _ = run(capsys, "check", "--op", "min", *SMALL)
    assert json.loads(out)["grid"]["seed"] == 42
    monkeypatch.setenv("PSEUDOMUL_SEED", "7")
    _, out, _ = run(capsys, "check", "--op", "min", *SMALL)
    assert json.loads(out)["grid"]["seed"] == 7
    _, out, _ = run(capsys, "check", "--op", "min", "--seed", "3", *SMALL)
    assert json.loads(out)["grid"]["seed"] == 3
    monkeypatch.setenv("PSEUDOMUL_SEED", "seven")
    assert run(capsys, "check", "--op", "min", *SMALL)[0] == 2


def test_out_file(capsys, tmp_path):
    target = tmp_path / "report.json"
    code, out, _ = run(capsys, "classify", "--op", "min", "--out", str(target))
    assert code == 0 and out == ""
    assert json.loads(target.read_text())["class"] == "all"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "pseudomul", "classify", "--op", "min"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["class"] == "all"
