import json
import os

import pytest

from stabzx import cli

from conftest import DATA, ROOT_DATA, planted_registry


def run(capsys, *argv):
    code = cli.main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _reports(out):
    return {n: open(os.path.join(out, n), "rb").read() for n in sorted(os.listdir(out))}


def test_eval_worked_example(capsys):
    code, out, _ = run(capsys, "eval", os.path.join(ROOT_DATA, "worked_example.json"))
    assert code == 0
    assert "[(w)/rt2^2, 0, (-w^3)/rt2^2, 0]" in out.splitlines()


def test_eval_scalars(capsys):
    assert run(capsys, "eval", os.path.join(ROOT_DATA, "empty.json"))[1].splitlines()[0] == "1"
    assert run(capsys, "eval", os.path.join(ROOT_DATA, "zpi_scalar.json"))[1].splitlines()[0] == "0"


def test_eval_flat(capsys):
    code, out, _ = run(capsys, "eval", "--kind", "flat", os.path.join(ROOT_DATA, "hopf_lhs.json"))
    assert code == 0 and out


def test_render(capsys):
    code, out, _ = run(capsys, "render", os.path.join(ROOT_DATA, "empty.json"))
    assert code == 0 and out == "graph zx {\n}\n"
    code, a, _ = run(capsys, "render", os.path.join(ROOT_DATA, "worked_example.json"))
    _, b, _ = run(capsys, "render", os.path.join(ROOT_DATA, "worked_example.json"))
    assert code == 0 and a == b


@pytest.mark.parametrize("argv", [
    [],
    ["frobnicate"],
    ["eval"],
    ["eval", "/no/such/file.json"],
    ["check", "--rules", "nope"],
    ["check", "--max-legs", "-1"],
    ["eval", "--kind", "weird", "x.json"],
    ["fuzz", "--seed", "-5"],
    ["fuzz", "--max-wires", "40"],
    ["replay", "no_such_script"],
])
def test_usage_errors(capsys, argv, tmp_reports):
    assert cli.main(argv + (["--out", tmp_reports] if argv and argv[0] in ("fuzz", "replay") else [])) == 2


def test_malformed_diagram(capsys, tmp_path):
    p = tmp_path / "bad.json"
    p.write_text('{"vertices": [{"id": 0, "kind": "Q"}], "edges": [], "inputs": [], "outputs": []}')
    code, _, err = run(capsys, "eval", str(p))
    assert code == 2 and "$" in err


def test_check_standard(capsys, tmp_reports):
    code, out, _ = run(capsys, "check", "--out", tmp_reports, "--max-legs", "2")
    assert code == 0 and "overall: PASS" in out
    manifest = json.load(open(os.path.join(tmp_reports, "latest.json")))
    assert "check" in manifest


def test_check_flat_simplified(capsys, tmp_reports):
    code, out, _ = run(capsys, "check", "--kind", "flat", "--out", tmp_reports)
    assert code == 0 and "['B2p', 'S3p_R']" in out


def test_check_is_byte_deterministic(capsys, tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    run(capsys, "check", "--out", a, "--max-legs", "1")
    run(capsys, "check", "--out", b, "--max-legs", "1")
    ra, rb = _reports(a), _reports(b)
    assert ra.keys() == rb.keys()
    for k in ra:
        if k != "latest.json":
            assert ra[k] == rb[k]


@pytest.mark.parametrize("name", ["green_identity", "hopf"])
def test_replay_builtin(capsys, tmp_reports, name):
    code, out, _ = run(capsys, "replay", name, "--out", tmp_reports)
    assert code == 0 and out.rstrip().endswith("verified")
    assert any(n.endswith("-final.json") for n in os.listdir(tmp_reports))


def test_replay_file(capsys, tmp_reports):
    code, _, _ = run(capsys, "replay", os.path.join(DATA, "fusion.deriv.json"), "--out", tmp_reports)
    assert code == 0


def test_replay_corrupted(capsys, tmp_reports):
    code, out, _ = run(capsys, "replay", os.path.join(DATA, "hopf_corrupted.deriv.json"), "--out", tmp_reports)
    assert code == 1 and "StepInapplicable" in out


def test_replay_malformed_script(capsys, tmp_path, tmp_reports):
    p = tmp_path / "s.json"
    p.write_text("{not json")
    assert run(capsys, "replay", str(p), "--out", tmp_reports)[0] == 2


def test_fuzz_clean(capsys, tmp_reports):
    code, out, _ = run(capsys, "fuzz", "--seed", "11", "--steps", "30", "--out", tmp_reports)
    assert code == 0 and "violations 0" in out


def test_fuzz_reports_are_byte_deterministic(capsys, tmp_path):
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    run(capsys, "fuzz", "--seed", "5", "--steps", "15", "--out", a)
    run(capsys, "fuzz", "--seed", "5", "--steps", "15", "--out", b)
    assert _reports(a) == _reports(b)


def test_fuzz_planted_bug_writes_reproducer(capsys, tmp_reports):
    args = cli.build_parser().parse_args(["fuzz", "--seed", "1", "--steps", "300", "--out", tmp_reports])
    code = cli.cmd_fuzz(args, planted_registry())
    out = capsys.readouterr().out
    assert code == 1 and "reproducer written" in out
    repro = [n for n in os.listdir(tmp_reports) if n.endswith("-reproducer.json")]
    doc = json.load(open(os.path.join(tmp_reports, repro[0])))
    assert doc["rule"] == "S1" and doc["seed"] == 1


def test_module_entry_point():
    import subprocess
    import sys

    r = subprocess.run([sys.executable, "-m", "stabzx", "eval", os.path.join(ROOT_DATA, "empty.json")],
                       capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.splitlines()[0] == "1"
