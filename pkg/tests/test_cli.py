import json
from pathlib import Path

import pytest

from bigcenter import cli

ROOT = Path(__file__).resolve().parents[1]
GOLDEN = Path(__file__).parent / "golden"
DATA = Path(__file__).parent / "data"


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name, argv", [
    ("embed", ["embed"]),
    ("delta", ["delta"]),
    ("ope", ["ope", "--truncation", "6"]),
    ("solve", ["--spec", str(ROOT / "jobs" / "solve.toml")]),
    ("twist", ["--spec", str(ROOT / "jobs" / "twist.toml")]),
    ("commutator_random", ["--spec", str(ROOT / "jobs" / "commutator_random.toml")]),
])
def test_golden_text(capsys, name, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0
    assert out == (GOLDEN / f"{name}.txt").read_text(encoding="utf-8")


def test_ope_displays(capsys):
    _, out, _ = run(capsys, "ope")
    assert "delta(x)(z) delta(y)(w) ~ (z-w)^-2 det(w) - (z-w)^-1 d*(w)" in out
    assert "delta(x)(z) delta(x)(w) ~ -(z-w)^-1 c*(w)" in out
    assert "delta(y)(z) delta(y)(w) ~ (z-w)^-1 b*(w)" in out


def test_embed_first_entry(capsys):
    _, out, _ = run(capsys, "embed", "--mode", "1")
    assert "a*_{-1} = -A*_{-2}D*_{-1} + B*_{-2}C*_{-1}" in out


def test_deterministic(capsys):
    spec = str(ROOT / "jobs" / "commutator_random.toml")
    first = run(capsys, "--spec", spec, "--output", "structured")
    second = run(capsys, "--spec", spec, "--output", "structured")
    assert first == second


def test_seed_changes_random_connection(capsys):
    spec = str(ROOT / "jobs" / "commutator_random.toml")
    _, a, _ = run(capsys, "--spec", spec, "--output", "structured", "--seed", "1")
    _, b, _ = run(capsys, "--spec", spec, "--output", "structured", "--seed", "2")
    assert json.loads(a)["result"]["connection"] != json.loads(b)["result"]["connection"]


def test_zero_connection_commutator_has_zero_diff(capsys):
    code, out, _ = run(capsys, "commutator", "--truncation", "5")
    assert code == 0
    diffs = [line for line in out.splitlines() if line.strip().startswith("diff:")]
    assert diffs and all(line.split(":")[1].strip() == "0" for line in diffs)


def test_structured_schema(capsys):
    code, out, _ = run(capsys, "--spec", str(ROOT / "jobs" / "solve.toml"), "--output", "structured")
    doc = json.loads(out)
    assert code == 0 and doc["command"] == "solve" and doc["status"] == 0
    sol = doc["result"]["solution"]
    assert sol["order"] == 6
    assert sol["coefficients"][2][0] == ["1/2", "-1/4"]
    assert "." not in out.replace("...", "")


def test_structured_lam_and_monomials(capsys):
    _, out, _ = run(capsys, "--spec", str(ROOT / "jobs" / "twist.toml"), "--output", "structured")
    doc = json.loads(out)
    comm = doc["result"]["commutators"]
    coeff = [c for c in comm if c["m"] == -1 and c["n"] == -1][0]["reduced"][0]["coeff"]
    assert coeff == {"poly": [{"coeff": "1/1", "monomial": [["lam", None, 1]]}]}
    _, out, _ = run(capsys, "embed", "--output", "structured")
    first = json.loads(out)["result"]["matrix"][0][0]
    assert first["poly"][0] == {"coeff": "-1/1", "monomial": [["A*", -2, 1], ["D*", -1, 1]]}


def test_selftest_filter(capsys):
    code, out, _ = run(capsys, "selftest", "--criterion", "1", "--criterion", "11")
    assert code == 0
    lines = out.splitlines()
    assert len(lines) == 2
    assert lines[0].startswith("[PASS] criterion 1:")
    assert lines[1].startswith("[PASS] criterion 11:")


def test_selftest_unknown_criterion(capsys):
    code, _, err = run(capsys, "selftest", "--criterion", "99")
    assert code == 2 and "99" in err


def test_mismatch_exit_code(capsys):
    code, out, _ = run(capsys, "--spec", str(DATA / "nonequivariant.toml"))
    assert code == 1
    assert "diff:    -id" in out


@pytest.mark.parametrize("text, message", [
    ('command = "solve"\ntruncation = 1\n', "at least 2"),
    ('command = "fly"\n', "command"),
    ('command = "solve"\n[connection]\ncoefficients = [[["1", "0"], ["0", "1"]]]\n', "not traceless"),
    ('command = "solve"\n[connection]\ncoefficients = [[[0.5, 0], [0, -0.5]]]\n', "floating point"),
    ('command = "solve"\ngroup = "sl3"\n', "sl2"),
    ('command = "solve"\ntruncation = \n', "line 2"),
    ('command = "ope"\nalgebra = "virasoro"\n', "unknown builtin"),
    ('command = "ope"\n[modes]\npairs = [["x", "q"]]\n', "modes.pairs"),
    ('command = "twist"\n[connection]\nsingular = [["0", "0"], ["1", "0"]]\n', "unsupported normal form"),
])
def test_invalid_input(capsys, tmp_path, text, message):
    path = tmp_path / "job.toml"
    path.write_text(text)
    code, _, err = run(capsys, "--spec", str(path))
    assert code == 2
    assert message in err


def test_missing_spec_file(capsys, tmp_path):
    code, _, err = run(capsys, "--spec", str(tmp_path / "nope.toml"))
    assert code == 2 and "cannot read spec" in err


def test_insufficient_truncation_message(capsys):
    code, _, err = run(capsys, "commutator", "--truncation", "2")
    assert code == 2
    assert "need N >= 3" in err
