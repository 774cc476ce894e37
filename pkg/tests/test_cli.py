import json
import re
import subprocess
import sys

import pytest

from fieldalg import cli


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture(scope="module")
def counterexample_json():
    proc = subprocess.run([sys.executable, "-m", "fieldalg", "run", "--scenario", "counterexample",
                           "--degree", "8", "--window", "10", "--format", "json"],
                          capture_output=True, text=True)
    return proc.returncode, proc.stdout


def test_counterexample_scenario(counterexample_json):
    code, text = counterexample_json
    assert code == 0
    doc = json.loads(text)
    assert doc["suite"] == "counterexample" and doc["exact"] is True
    assert doc["params"] == {"D": 8, "W": 10, "Nmax": 8, "depth": 3}
    verdicts = {c["name"]: c["verdict"] for c in doc["checks"]}
    assert {k: v for k, v in verdicts.items() if k.startswith("counterexample/")} == {
        "counterexample/commutator": "holds",
        "counterexample/products": "holds",
        "counterexample/weak-locality": "holds",
        "counterexample/skewsymmetry": "fails",
    }


def test_json_roundtrip_is_byte_identical(counterexample_json):
    _, text = counterexample_json
    assert cli.to_json(json.loads(text)) == text


def test_checks_follow_schema(counterexample_json):
    doc = json.loads(counterexample_json[1])
    assert set(doc) == {"suite", "params", "checks", "exact"}
    for c in doc["checks"]:
        assert {"name", "verdict", "window"} <= set(c) <= {"name", "verdict", "window", "witness"}
        assert ("witness" in c) == (c["verdict"] == "fails")
    names = [c["name"] for c in doc["checks"]]
    assert names == sorted(names)


def test_negative_degree_is_a_usage_error(capsys):
    code, _, err = run(["run", "--scenario", "free-boson", "--degree", "-1"], capsys)
    assert code == cli.EXIT_USAGE
    assert "must be >= 0" in err


def test_unknown_scenario_is_a_usage_error(capsys):
    assert run(["run", "--scenario", "nope"], capsys)[0] == cli.EXIT_USAGE


def test_explain(capsys):
    code, out, _ = run(["explain", "associativity"], capsys)
    assert code == 0 and "(z-w)^N" in out
    code, out, _ = run(["explain", "weak-locality"], capsys)
    assert code == 0 and "Res_z" in out
    code, out, _ = run(["explain", "matrices/opposite/nth-product"], capsys)
    assert out.startswith("opposite:")


def test_explain_unknown_lists_suggestions(capsys):
    code, _, err = run(["explain", "asociativity"], capsys)
    assert code == cli.EXIT_USAGE
    assert "did you mean: associativity" in err
    code, _, err = run(["explain", "nope"], capsys)
    assert code == cli.EXIT_USAGE and "known checks:" in err


def test_explain_has_no_equation_numbers():
    for text in cli.EXPLAIN.values():
        assert not re.search(r"\(\d+\.\d+", text)


def test_out_dir_from_environment(tmp_path, monkeypatch, capsys):
    monkeypatch.setenv(cli.OUT_DIR_ENV, str(tmp_path))
    code, out, _ = run(["run", "--scenario", "uniqueness", "--format", "json"], capsys)
    assert code == 0 and out == ""
    doc = json.loads((tmp_path / "uniqueness.json").read_text())
    assert len(doc["checks"]) == 22


def test_unwritable_output_is_an_io_error(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("")
    code, _, err = run(["run", "--scenario", "uniqueness", "--out", str(blocker / "r.txt")], capsys)
    assert code == cli.EXIT_IO and "cannot write" in err


def test_text_format(capsys):
    code, out, _ = run(["run", "--scenario", "uniqueness", "--seed", "3"], capsys)
    assert code == 0
    assert "[ok] uniqueness/perturbed-03: inapplicable" in out
    assert out.rstrip().splitlines()[-1].startswith("22 checks, 0 mismatches")


def test_expected_table():
    assert cli.expected_verdict("counterexample/skewsymmetry") == "fails"
    assert cli.expected_verdict("matrices/equivalence/vacuum-broken/local-axioms") == "fails"
    assert cli.expected_verdict("matrices/equivalence/base/local-axioms") == "holds"
    assert cli.expected_verdict("dong/(alpha, alpha, alpha)") == "holds"
    assert cli.expected_verdict("dong/(alpha, alpha, beta)") == "fails"
    assert cli.expected_verdict("dong/(beta, :alpha alpha:, alpha)") == "inapplicable"


def test_exit_status_depends_only_on_verdicts(monkeypatch, capsys):
    from fieldalg.report import CheckReport

    def fake(name, cfg):
        return [CheckReport("counterexample/skewsymmetry", "holds", {}, {})]

    monkeypatch.setattr(cli, "run_scenario", fake)
    code, out, _ = run(["run", "--scenario", "counterexample"], capsys)
    assert code == cli.EXIT_MISMATCH and "MISMATCH" in out
