import json

import pytest

from orbitree.cli import main
from orbitree.families import whittaker
from orbitree.io import af_to_json

from .test_acceptance import example_f


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def af_file(tmp_path):
    def write(f, name="f.json"):
        p = tmp_path / name
        p.write_text(json.dumps(af_to_json(f)))
        return str(p)

    return write


def test_jordan_zero(capsys, tmp_path):
    p = tmp_path / "m.json"
    p.write_text("[[0,0,0],[0,0,0],[0,0,0]]")
    code, out, _ = run(capsys, "jordan", str(p))
    assert code == 0 and json.loads(out) == {"jordan": [1, 1, 1]}


def test_omega_whittaker(capsys, af_file):
    code, out, _ = run(capsys, "omega", af_file(whittaker(3)))
    data = json.loads(out)
    assert code == 0 and data["omega"] == [[3]] and data["mult"] == {"3": 1}


def test_omega_guided(capsys, af_file):
    code, out, _ = run(capsys, "omega", af_file(example_f()), "--strategy", "guided")
    assert code == 0 and json.loads(out)["omega_fin"] == [[4, 1, 1], [3, 3]]


def test_verify_example(capsys):
    code, out, _ = run(capsys, "verify", "thD1", "--n", "3", "--k", "2", "--l", "2")
    rep = json.loads(out)
    assert code == 0 and rep["pass"] and rep["computed"] == [[4, 1, 1], [3, 3]]


def test_verify_missing_params(capsys):
    code, _, err = run(capsys, "verify", "thD1", "--n", "3")
    assert code == 2 and json.loads(err)["error"] == "input"


def test_tree_and_render(capsys, af_file, tmp_path):
    dot = tmp_path / "t.dot"
    code, _, _ = run(capsys, "tree", "xi-st", af_file(example_f()), "--dot", str(dot))
    assert code == 0 and dot.read_text().startswith("digraph")
    code, out, _ = run(capsys, "render", af_file(whittaker(2)))
    assert code == 0 and out == "1 ●\n· 2\n"


def test_build_round_trip(capsys, tmp_path):
    out = tmp_path / "b.json"
    assert run(capsys, "build", "fnkl", "--n", "3", "--k", "2", "--l", "2", "--out", str(out))[0] == 0
    code, text, _ = run(capsys, "omega", str(out), "--mode", "critical")
    assert code == 0 and json.loads(text)["omega_fin"] == [[4, 1, 1], [3, 3]]


def test_bad_inputs(capsys, tmp_path):
    code, _, err = run(capsys, "omega", str(tmp_path / "missing.json"))
    assert code == 2 and json.loads(err)["error"] == "input"
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run(capsys, "omega", str(bad))[0] == 2
    code, _, err = run(capsys, "frobnicate")
    assert code == 2 and len(err.strip().splitlines()) == 1
    assert run(capsys, "build", "fak", "--a", "2,x", "--k", "2")[0] == 2


def test_size_envelope(capsys, monkeypatch):
    monkeypatch.setenv("ORBITREE_MAX_N", "4")
    code, _, err = run(capsys, "build", "fnkl", "--n", "3", "--k", "2", "--l", "2")
    assert code == 2 and "envelope" in err


def test_verify_grid(capsys):
    code, out, _ = run(capsys, "verify-grid", "--which", "thD2", "--max-N", "7")
    lines = [json.loads(x) for x in out.splitlines()]
    assert code == 0 and lines[-1]["pass"] and lines[-1]["instances"] == 3
