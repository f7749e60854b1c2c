"""Command-line behaviour: exit codes, config precedence, deterministic output."""

import json

import pytest

from enbar.cli import RunConfig, UsageError, main, run_suite, SUITES
from enbar.exactlin import Ring, ZZ


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_verify_n2_passes(capsys):
    code, out, _ = run(capsys, "verify", "--n", "2", "--arity-max", "3", "--ring", "z")
    doc = json.loads(out)
    assert code == 0 and doc["ok"]
    assert set(doc["suites"]) == set(SUITES)


def test_verify_n1_fp2_passes(capsys):
    code, out, _ = run(capsys, "verify", "--n", "1", "--arity-max", "4", "--ring", "fp:2", "--format", "text")
    assert code == 0
    assert out.count("pass") == len(SUITES)


@pytest.mark.parametrize("ring", ["fp:4", "fp:x", "r"])
def test_bad_ring_is_usage_error(capsys, ring):
    code, _, err = run(capsys, "verify", "--ring", ring)
    assert code == 2 and "error" in err


def test_argparse_errors_exit_2(capsys):
    with pytest.raises(SystemExit) as info:
        main(["homology", "--object", "nonsense"])
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        main(["verify", "--n", "0"])
    assert info.value.code == 2


def test_bounds_guard(capsys):
    code, _, err = run(capsys, "verify", "--n", "3", "--arity-max", "6")
    assert code == 2 and "estimated basis size" in err
    code, _, err = run(capsys, "info", "--object", "en", "--n", "2", "--arity", "6")
    assert code == 2 and "estimated basis size" in err


def test_counterexample_exit_status(monkeypatch, capsys):
    import enbar.cli as cli

    monkeypatch.setattr(cli, "run_suite", lambda *a, **k: {"ok": False, "checked": 1, "counterexample": "(1)"})
    code, out, _ = run(capsys, "verify", "--suite", "twisting")
    assert code == 1 and json.loads(out)["suites"]["twisting"]["counterexample"] == "(1)"


def test_homology_bar_module(capsys):
    code, out, _ = run(capsys, "homology", "--object", "bar-module", "--n", "2", "--arity", "2", "--ring", "z")
    doc = json.loads(out)
    assert code == 0
    assert doc["table"] and all(r["free_rank"] == 0 and not r["torsion"] for r in doc["table"])


def test_homology_en_operad(capsys):
    code, out, _ = run(capsys, "homology", "--object", "en-operad", "--n", "2", "--arity", "3", "--ring", "q")
    ranks = {r["degree"]: r["free_rank"] for r in json.loads(out)["table"]}
    assert ranks == {0: 1, 1: 3, 2: 2, 3: 0}


def test_homology_bar_eval(capsys):
    code, out, _ = run(capsys, "homology", "--object", "bar-eval", "--algebra", "trivial:1", "--n", "1",
                       "--degree-max", "5", "--format", "csv")
    lines = out.strip().splitlines()[1:]
    assert code == 0 and len(lines) == 5
    assert [line.split(",")[4:6] for line in lines] == [[str(d), "1"] for d in range(1, 6)]


def test_homology_stabilization(capsys):
    code, out, _ = run(capsys, "homology", "--object", "stabilization", "--arity", "2", "--n", "3")
    assert code == 0 and json.loads(out)["ok"]


def test_homology_harrison(capsys):
    code, out, _ = run(capsys, "homology", "--object", "harrison", "--arity-max", "3", "--format", "text")
    assert code == 0 and "arity 1 weight 1 degree 1: rank 1" in out


@pytest.mark.parametrize(
    "argv, expected",
    [
        (["--object", "tn", "--n", "2", "--arity", "3"], "total 24"),
        (["--object", "en", "--n", "2", "--arity", "2"], "by degree 0:2 1:2"),
        (["--object", "cup", "--m", "1"], "[21|12]"),
        (["--object", "gn", "--n", "3", "--arity", "3"], "G^3(3) total 9"),
        (["--object", "levels", "--n", "2", "--arity", "3"], "1:6 2:78"),
    ],
)
def test_info(capsys, argv, expected):
    code, out, _ = run(capsys, "info", *argv)
    assert code == 0 and expected in out


def test_info_twisting_json(capsys):
    code, out, _ = run(capsys, "info", "--object", "twisting", "--n", "2", "--arity", "2")
    doc = json.loads(out)
    assert doc["operad"] == "E" and "((1)(2))" in doc["table"]


def test_env_precedence(monkeypatch, capsys):
    monkeypatch.setenv("ENBAR_RING", "fp:3")
    _, out, _ = run(capsys, "homology", "--object", "en-operad", "--arity", "2")
    assert json.loads(out)["ring"] == "fp:3"
    _, out, _ = run(capsys, "homology", "--object", "en-operad", "--arity", "2", "--ring", "q")
    assert json.loads(out)["ring"] == "q"
    monkeypatch.setenv("ENBAR_THREADS", "many")
    code, _, _ = run(capsys, "homology", "--object", "en-operad", "--arity", "2")
    assert code == 2


def test_output_is_byte_identical_across_threads(monkeypatch, capsys, tmp_path):
    outputs = []
    for width in ("1", "4"):
        monkeypatch.setenv("ENBAR_THREADS", width)
        path = tmp_path / f"out{width}.json"
        code, _, _ = run(capsys, "homology", "--object", "bar-module", "--n", "1", "--arity-max", "3",
                         "--output", str(path))
        assert code == 0
        outputs.append(path.read_bytes())
    assert outputs[0] == outputs[1]


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig(ring=ZZ, n=0)
    assert RunConfig(ring=Ring.parse("q")).arity_max == 3


@pytest.mark.parametrize("suite", SUITES)
def test_each_suite_over_f2(suite):
    assert run_suite(suite, 2, 3, Ring.parse("fp:2"))["ok"]
