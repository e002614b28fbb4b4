"""End-to-end checks of the fockdil command-line tool on the fixtures in tests/data."""

import json
import math
import os
import subprocess
from pathlib import Path

import pytest

BIN = os.environ.get("FOCKDIL_BIN", "fockdil")
DATA = Path(os.environ.get("FOCKDIL_DATA", Path(__file__).resolve().parents[1] / "data"))

TUPLE_COMMANDS = ["validate", "defects", "stability", "dilate", "poisson", "charfn", "ext-charfn",
                  "fixpoints", "curv", "euler", "constrain", "cocycle"]
LIFTING_COMMANDS = ["validate", "lift-charfn", "constrained-charfn", "classify", "kappa-inv", "trace-identity"]


def run(*args, env=None):
    return subprocess.run([BIN, *map(str, args)], capture_output=True, text=True, env=env, timeout=300)


def report(*args):
    proc = run(*args)
    return proc, json.loads(proc.stdout)


def vec(pairs):
    return [complex(re, im) for re, im in pairs]


def test_extended_characteristic_function_of_the_pair():
    proc, rep = report("ext-charfn", DATA / "ergodic_pair.json", "--trunc", "8")
    assert proc.returncode == 0, proc.stderr
    values = rep["outputs"]["d_Omega"]
    # -(1/6)(-1, 1) at the empty word, half that with the opposite sign at 1.2.
    assert all(abs(a - b) < 1e-10 for a, b in zip(vec(values[0]["0"]), [1 / 6, -1 / 6]))
    assert all(abs(a - b) < 1e-10 for a, b in zip(vec(values[0]["1.2"]), [-1 / 12, 1 / 12]))
    # Words with a repeated adjacent letter vanish.
    assert "1.1" not in values[0] and "2.2.1" not in values[0]
    for word, v in values[0].items():
        assert all(abs(a + b) < 1e-10 for a, b in zip(vec(v), vec(values[1][word])))


def test_validate_names_the_failing_assertion():
    proc, rep = report("validate", DATA / "bad.json")
    assert proc.returncode == 1
    assert "row_contraction" in proc.stderr
    failed = [a["name"] for a in rep["assertions"] if not a["pass"]]
    assert failed == ["row_contraction"]
    assert rep["status"] == "fail"


def test_equivalence_of_rotated_symbols():
    proc, rep = report("equiv", DATA / "a.sym", DATA / "b.sym", "--tol", "1e-6")
    assert proc.returncode == 0, proc.stderr
    assert rep["outputs"]["residual"] < 1e-9
    v = rep["outputs"]["v"]
    # v is unitary.
    for i in range(2):
        for j in range(2):
            ip = sum(complex(*v[k][i]).conjugate() * complex(*v[k][j]) for k in range(2))
            assert abs(ip - (1 if i == j else 0)) < 1e-9


@pytest.mark.parametrize("command", TUPLE_COMMANDS)
def test_tuple_commands(command):
    proc, rep = report(command, DATA / "ergodic_pair.json", "--trunc", "5")
    assert proc.returncode == 0, proc.stderr
    assert rep["command"] == command
    assert rep["assertions"], "every report carries assertions"
    assert all(a["pass"] for a in rep["assertions"])
    assert len(rep["inputs"][0]["fnv1a"]) == 16


@pytest.mark.parametrize("command", LIFTING_COMMANDS)
def test_lifting_commands(command):
    proc, rep = report(command, DATA / "scaled_shift.json", "--trunc", "6")
    assert proc.returncode == 0, proc.stderr
    assert rep["assertions"]
    assert all(a["pass"] for a in rep["assertions"])


def test_compose_and_model():
    proc, rep = report("compose", DATA / "a.sym", DATA / "b.sym")
    assert proc.returncode == 0, proc.stderr
    assert rep["outputs"]["N"] == 4
    proc, rep = report("model", DATA / "model_base.json", DATA / "model.sym", "--trunc", "4")
    assert proc.returncode == 0, proc.stderr
    assert rep["outputs"]["roundtrip_residual"] < 1e-9


def test_selected_outputs():
    _, rep = report("fixpoints", DATA / "ergodic_pair.json")
    assert rep["outputs"]["dim"] == 1
    _, rep = report("constrain", DATA / "ergodic_pair.json", "--trunc", "6")
    assert rep["outputs"]["level_dims"] == [1, 2, 3, 4, 5, 6, 7]
    assert rep["outputs"]["piece_dim"] <= 1
    _, rep = report("classify", DATA / "nilpotent.json")
    assert rep["outputs"]["reduced"] is True
    _, rep = report("curv", DATA / "ergodic_pair.json")
    assert all(abs(c) < 1e-12 for c in rep["outputs"]["free"]["sequence"])


def test_reports_are_deterministic():
    first = run("lift-charfn", DATA / "scaled_shift.json", "--seed", "7")
    second = run("lift-charfn", DATA / "scaled_shift.json", "--seed", "7")
    assert first.stdout == second.stdout
    # Doubles carry 17 significant digits.
    assert "1.0000000000000001e-09" in first.stdout


def test_parse_errors_exit_with_2(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text("{ not json")
    assert run("validate", broken).returncode == 2
    assert run("validate", tmp_path / "missing.json").returncode == 2
    assert run("equiv", DATA / "a.sym").returncode == 2
    assert run("validate", DATA / "bad.json", "--report", "yaml").returncode == 2
    assert run("lift-charfn", DATA / "ergodic_pair.json").returncode == 2


def test_inconsistent_lifting_fails_an_assertion(tmp_path):
    doc = json.loads((DATA / "scaled_shift.json").read_text())
    # A nonzero B on a unitary C cannot come from a contraction.
    doc.update({"dim_C": 1, "C": [[[[1, 0]]], [[[0, 0]]]], "B": [[[[0.3, 0]]], [[[0, 0]]]]})
    path = tmp_path / "inconsistent.json"
    path.write_text(json.dumps(doc))
    proc = run("classify", path)
    assert proc.returncode == 1
    assert "lifting_consistent" in proc.stderr


def test_out_directory_text_and_csv(tmp_path):
    env = dict(os.environ, FOCKDIL_THREADS="2")
    files = [DATA / "ergodic_pair.json", DATA / "bad.json"]
    proc = run("curv", *files, "--out", tmp_path, "--report", "csv", "--trunc", "5", env=env)
    assert proc.returncode == 1
    names = sorted(p.name for p in tmp_path.iterdir())
    assert "ergodic_pair.curv.assertions.csv" in names
    assert "bad.curv.assertions.csv" in names
    curvature = [n for n in names if n.startswith("ergodic_pair.curv.") and n != "ergodic_pair.curv.assertions.csv"]
    assert curvature
    lines = (tmp_path / curvature[0]).read_text().splitlines()
    assert lines[0] == "n,statistic,normalization,estimate"
    assert len(lines) == 6
    assert not any(n.endswith(".tmp") for n in names)

    proc = run("validate", DATA / "ergodic_pair.json", "--out", tmp_path, "--report", "text")
    assert proc.returncode == 0
    text = (tmp_path / "ergodic_pair.validate.txt").read_text()
    assert "PASS row_contraction" in text


def test_cocycle_bound_on_the_pair():
    _, rep = report("cocycle", DATA / "ergodic_pair.json", "--trunc", "6")
    errs, bounds = rep["outputs"]["errors"], rep["outputs"]["bounds"]
    assert len(errs) == 6
    assert all(e <= b * (1 + 1e-12) for e, b in zip(errs, bounds))
    assert not math.isnan(sum(errs))
