import csv
import json
import subprocess
import sys
from fractions import Fraction

import pytest

from fairdiv.cli import main
from fairdiv.gen import generate


def _write(tmp_path, name, obj):
    p = tmp_path / name
    p.write_text(json.dumps(obj))
    return str(p)


def _run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def example(tmp_path):
    inst = {"n": 2, "m": 3, "valuations": [{"kind": "additive", "values": [2, 1, 1]}] * 2}
    return _write(tmp_path, "inst.json", inst), _write(tmp_path, "alloc.json", [[1], [0, 2]])


def test_verify_efx_false(capsys, example):
    code, out, _ = _run(capsys, "verify", *example, "--property", "efx")
    assert code == 1
    assert json.loads(out) == {"verdict": False, "alpha": "1/2", "witnesses": [[0, 1, 2]]}


def test_verify_max_alpha(capsys, example):
    code, out, _ = _run(capsys, "verify", *example, "--property", "max-alpha")
    assert code == 0 and json.loads(out)["alpha"] == "1/2"


def test_verify_true_and_alpha(capsys, example, tmp_path):
    inst, _ = example
    good = _write(tmp_path, "good.json", {"bundles": [[0], [1, 2]]})
    assert _run(capsys, "verify", inst, good, "--property", "efx")[0] == 0
    assert _run(capsys, "verify", *example, "--property", "alpha-efx:1/2")[0] == 0
    assert _run(capsys, "verify", *example, "--property", "ef1")[0] == 0


@pytest.mark.parametrize("prop", ["mms", "alpha-efx:x", "alpha-efx:3/2"])
def test_verify_bad_property(capsys, example, prop):
    assert _run(capsys, "verify", *example, "--property", prop)[0] == 2


def test_verify_bad_allocation(capsys, example, tmp_path):
    inst, _ = example
    bad = _write(tmp_path, "bad.json", [[0, 1], [1]])
    assert _run(capsys, "verify", inst, bad, "--property", "efx")[0] == 2


def test_solve_top_n(capsys, tmp_path):
    inst = _write(tmp_path, "i.json", generate("common_top_n", {"n": 3, "m": 8}, 7).to_json())
    code, out, _ = _run(capsys, "solve", inst, "--algorithm", "top-n")
    doc = json.loads(out)
    assert code == 0
    assert Fraction(doc["certificate"]["certified_factor"]) >= Fraction(2, 3)
    assert Fraction(doc["verified"]["efx_alpha"]) >= Fraction(2, 3)
    assert doc["verified"]["ef1"] is True
    assert sorted(g for b in doc["allocation"] for g in b) == list(range(8))


def test_solve_ece_and_trace(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv("FAIRDIV_TRACE_DIR", str(tmp_path / "traces"))
    inst = _write(tmp_path, "i.json", generate("random_additive", {"n": 3, "m": 6}, 1).to_json())
    code, out, _ = _run(capsys, "solve", inst, "--algorithm", "ece", "--trace")
    assert code == 0 and json.loads(out)["verified"]["ef1"] is True
    lines = (tmp_path / "traces" / "trace-ece.jsonl").read_text().splitlines()
    assert len(lines) == 6
    assert set(json.loads(lines[0])) == {"round", "source", "item", "cycles_rotated"}


def test_solve_tiered_needs_three_agents(capsys, example):
    code, out, err = _run(capsys, "solve", example[0], "--algorithm", "tiered")
    assert code == 2 and out == "" and "n >= 3" in err


def test_solve_tiered_reports_fallbacks(capsys, tmp_path):
    inst = _write(tmp_path, "i.json", generate("tiered", {"n": 4, "m": 9}, 3).to_json())
    code, out, _ = _run(capsys, "solve", inst, "--algorithm", "tiered")
    doc = json.loads(out)
    assert code == 0 and doc["fallbacks"] == 0 and doc["verified"]["efx_alpha"] == "1"


@pytest.mark.parametrize("alg", ["nope", "framework", "framework:nope", "relaxed-top"])
def test_solve_bad_algorithm(capsys, example, alg):
    assert _run(capsys, "solve", example[0], "--algorithm", alg)[0] == 2


def test_solve_malformed_instance(capsys, tmp_path):
    bad = _write(tmp_path, "bad.json", {"valuations": [{"kind": "additive", "values": [0.5]}]})
    assert _run(capsys, "solve", bad, "--algorithm", "ece")[0] == 2
    assert _run(capsys, "solve", str(tmp_path / "missing.json"), "--algorithm", "ece")[0] == 2


def test_solve_oracle_exact(capsys, example):
    code, out, _ = _run(capsys, "solve", example[0], "--algorithm", "oracle-exact")
    assert code == 0 and json.loads(out)["allocation"] == [[0], [1, 2]]


def test_solve_framework_builder(capsys, example):
    code, out, _ = _run(capsys, "solve", example[0], "--algorithm", "framework:pick-rounds")
    assert code == 0 and Fraction(json.loads(out)["certificate"]["certified_factor"]) >= Fraction(1, 2)


def test_bench_outputs(capsys, tmp_path):
    prefix = tmp_path / "out" / "ece"
    code, out, _ = _run(
        capsys, "bench", "--family", "random_additive", "--n", "3", "--m", "7", "--seeds", "30",
        "--algorithm", "ece", "--out", str(prefix),
    )
    summary = json.loads(out)
    assert code == 0 and summary["runs"] == 30 and summary["ef1_pass_rate"] == 1.0
    rows = list(csv.DictReader(open(prefix.with_suffix(".csv"))))
    assert len(rows) == 30 and rows[0]["status"] == "ok"
    assert json.loads(prefix.with_suffix(".json").read_text()) == summary


def test_bench_inapplicable_rows(capsys):
    code, out, _ = _run(capsys, "bench", "--family", "random_additive", "--n", "3", "--m", "6",
                        "--seeds", "10", "--algorithm", "tiered")
    summary = json.loads(out)
    assert code == 0 and summary["runs"] == 10
    assert summary["inapplicable"] + summary["applicable"] == 10


def test_bench_is_deterministic(capsys):
    args = ["bench", "--family", "common_top_n", "--n", "3", "--m", "7", "--seeds", "5:25", "--algorithm", "top-n"]
    _, a, _ = _run(capsys, *args)
    _, b, _ = _run(capsys, *args)
    strip = lambda s: {k: v for k, v in json.loads(s).items() if k != "total_seconds"}  # noqa: E731
    assert strip(a) == strip(b)
    assert Fraction(json.loads(a)["min_alpha"]) >= Fraction(2, 3)


def test_bench_parallel_matches_serial(capsys):
    args = ["bench", "--family", "tiered", "--n", "3", "--m", "7", "--seeds", "12", "--algorithm", "tiered"]
    _, a, _ = _run(capsys, *args)
    _, b, _ = _run(capsys, *args, "--jobs", "2")
    strip = lambda s: {k: v for k, v in json.loads(s).items() if k != "total_seconds"}  # noqa: E731
    assert strip(a) == strip(b)


def test_generate_roundtrip(capsys):
    code, out, _ = _run(capsys, "generate", "--family", "tiered", "--n", "3", "--m", "6", "--seed", "4")
    assert code == 0 and json.loads(out)["n"] == 3
    assert _run(capsys, "generate", "--family", "tiered", "--n", "3", "--m", "6", "--seed", "4")[1] == out


def test_usage_errors(capsys):
    assert _run(capsys)[0] == 2
    assert _run(capsys, "bench", "--family", "x", "--n", "1", "--m", "1", "--algorithm", "ece")[0] == 2
    assert _run(capsys, "bench", "--family", "random_additive", "--n", "2", "--m", "3",
                "--seeds", "a:b", "--algorithm", "ece")[0] == 2


def test_module_entry_point(example):
    proc = subprocess.run(
        [sys.executable, "-m", "fairdiv", "verify", *example, "--property", "efx"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 1
    assert json.loads(proc.stdout)["witnesses"] == [[0, 1, 2]]


def test_invariant_breach_exits_3(capsys, example, monkeypatch):
    from fairdiv import cli
    from fairdiv.errors import InvariantBreach

    def boom(*a, **k):
        raise InvariantBreach("verifier rejects certified factor")

    monkeypatch.setattr(cli, "run_algorithm", boom)
    code, out, err = _run(capsys, "solve", example[0], "--algorithm", "ece")
    assert code == 3 and out == "" and "invariant" in err
