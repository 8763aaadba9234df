import csv
import io
import json
import subprocess
import sys

import pytest

from ampforge.cli import float_list, int_range, main, rows_to_csv, rows_to_json


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_encode_check_example(capsys):
    code, out, _ = run(["encode-check", "--n", "3", "--seed", "7"], capsys)
    assert code == 0
    (row,) = rows(out)
    assert float(row["max_block_deviation"]) <= 1e-9
    assert row["passed"] == "true" and row["controlled_U_queries"] == "6"


def test_encode_check_imaginary_part(capsys):
    code, out, _ = run(["encode-check", "--n", "1-2", "--p", "1", "--trials", "2"], capsys)
    assert code == 0 and len(rows(out)) == 4


def test_approx_error_example(capsys):
    code, out, _ = run(["approx-error", "--function", "tanh", "--k", "10"], capsys)
    assert code == 0
    (row,) = rows(out)
    assert row["k"] == "10"
    assert float(row["bound"]) == pytest.approx(0.098411, abs=1e-6)
    assert float(row["measured"]) <= 0.09785


def test_approx_error_range(capsys):
    code, out, _ = run(["approx-error", "--function", "gaussian", "--k", "3-6", "--sigma", "1"], capsys)
    assert code == 0 and [r["k"] for r in rows(out)] == ["3", "4", "5", "6"]


def test_transform_example(capsys):
    code, out, _ = run(["transform", "--function", "sin", "--n", "4", "--eps", "1e-3", "--seed", "1"], capsys)
    assert code == 0
    (row,) = rows(out)
    assert float(row["achieved_l2_error"]) <= 1e-3
    assert row["engine"] == "importance"


@pytest.mark.parametrize("engine", ["importance", "uniform"])
def test_transform_forced_engine(engine, capsys):
    code, out, _ = run(["transform", "--function", "tanh", "--n", "3", "--engine", engine], capsys)
    assert code == 0 and rows(out)[0]["engine"] == engine


def test_transform_wrong_engine_exits_1(capsys):
    code, _, err = run(["transform", "--function", "exp", "--n", "3", "--engine", "importance"], capsys)
    assert code == 1 and "WrongEngineError" in err


def test_max_find_example(capsys):
    code, out, _ = run(["max-find", "--amplitudes", "0.8,0.4,0.4,0.2", "--psi1", "0.8", "--gap", "0.4"], capsys)
    assert code == 0
    (row,) = rows(out)
    assert row["index"] == "0" and float(row["top_probability"]) >= 0.99


def test_max_find_bad_promise_exits_1(capsys):
    code, out, _ = run(["max-find", "--n", "3", "--gap", "0.04", "--claimed-gap", "0.4", "--seed", "5"], capsys)
    assert code == 1
    assert rows(out)[0]["passed"] == "false"


def test_max_find_planted_trials(capsys):
    code, out, _ = run(["max-find", "--n", "3", "--gap", "0.2", "--trials", "3"], capsys)
    assert code == 0 and len(rows(out)) == 3


def test_prepare_state(capsys):
    code, out, _ = run(["prepare-state", "--function", "constant", "--n", "4"], capsys)
    assert code == 0
    assert float(rows(out)[0]["filling_ratio"]) == pytest.approx(1.0)


def test_prepare_state_too_large_function_exits_1(capsys):
    code, _, _ = run(["prepare-state", "--function", "exp", "--a", "0", "--b", "1", "--n", "3"], capsys)
    assert code == 1


def test_lemma_fuzz(capsys):
    code, out, _ = run(["lemma-fuzz", "--parts", "ace", "--trials", "10"], capsys)
    assert code == 0 and [r["part"] for r in rows(out)] == ["h_bound", "normalized_deviation", "product_law"]


def test_benchmark_tanh_default_range(capsys):
    code, out, _ = run(["benchmark-tanh"], capsys)
    table = rows(out)
    assert code == 0 and [r["n"] for r in table] == [str(n) for n in range(4, 11)]
    assert 0.8 <= float(table[0]["uniform_slope"]) <= 1.2


def test_benchmark_tanh_failed_fit_exits_1(capsys):
    # n = 3..5 is below the scaling regime; the slope falls outside [0.8, 1.2]
    code, out, _ = run(["benchmark-tanh", "--n-min", "3", "--n-max", "5"], capsys)
    assert code == 1 and {r["passed"] for r in rows(out)} == {"false"}


@pytest.mark.parametrize(
    "argv",
    [
        ["encode-check", "--bogus"],
        ["no-such-command"],
        ["transform"],
        ["transform", "--function", "tan"],
        ["lemma-fuzz", "--parts", "xyz"],
        ["max-find", "--n", "3"],
        ["encode-check", "--n", "a-b"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    code, _, _ = run(argv, capsys)
    assert code == 2


def test_help_exits_0(capsys):
    assert main(["--help"]) == 0


def test_output_files(tmp_path, capsys):
    prefix = str(tmp_path / "enc")
    code, out, _ = run(["encode-check", "--n", "2", "--trials", "2", "--output", prefix], capsys)
    assert code == 0 and out == ""
    data = json.loads((tmp_path / "enc.json").read_text())
    table = rows((tmp_path / "enc.csv").read_text())
    assert [d["seed"] for d in data] == [0, 1]
    assert list(data[0]) == list(table[0])


def test_outputs_are_byte_identical(tmp_path, capsys):
    for name in ("a", "b"):
        assert main(["transform", "--function", "cos", "--n", "3", "--seed", "11", "--output", str(tmp_path / name)]) == 0
    for ext in ("csv", "json"):
        assert (tmp_path / f"a.{ext}").read_bytes() == (tmp_path / f"b.{ext}").read_bytes()


def test_parallel_matches_serial(tmp_path):
    assert main(["encode-check", "--n", "1-3", "--trials", "2", "--output", str(tmp_path / "s")]) == 0
    assert main(["encode-check", "--n", "1-3", "--trials", "2", "--jobs", "3", "--output", str(tmp_path / "p")]) == 0
    assert (tmp_path / "s.csv").read_bytes() == (tmp_path / "p.csv").read_bytes()


def test_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "encode-check", "n": [1, 2], "seed": 4}))
    code, out, _ = run(["encode-check", "--config", str(cfg)], capsys)
    assert code == 0
    assert [(r["n"], r["seed"]) for r in rows(out)] == [("1", "4"), ("2", "4")]
    code, out, _ = run(["encode-check", "--config", str(cfg), "--seed=9"], capsys)
    assert {r["seed"] for r in rows(out)} == {"9"}
    code, out, _ = run(["encode-check", "--seed", "8", "--config", str(cfg)], capsys)
    assert {r["seed"] for r in rows(out)} == {"8"}


@pytest.mark.parametrize(
    "cfg",
    [{"bogus": 1}, {"command": "transform"}, [1, 2]],
)
def test_bad_config_exits_2(tmp_path, cfg, capsys):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    code, _, _ = run(["encode-check", "--config", str(path)], capsys)
    assert code == 2


def test_missing_config_exits_2(tmp_path, capsys):
    code, _, _ = run(["encode-check", "--config", str(tmp_path / "none.json")], capsys)
    assert code == 2


def test_csv_and_json_formatting():
    data = [{"x": 0.1, "ok": True, "n": 3, "nan": float("nan"), "s": "tanh"}]
    text = rows_to_csv(data)
    assert text.splitlines()[0] == "x,ok,n,nan,s"
    assert text.splitlines()[1] == "0.10000000000000001,true,3,nan,tanh"
    assert json.loads(rows_to_json(data)) == [{"x": 0.1, "ok": True, "n": 3, "nan": None, "s": "tanh"}]


def test_range_parsers():
    assert int_range("4-7") == [4, 5, 6, 7]
    assert int_range("2,5") == [2, 5]
    assert float_list("0.5,1") == [0.5, 1.0]


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "ampforge", "encode-check", "--n", "1"], capture_output=True, text=True
    )
    assert res.returncode == 0 and res.stdout.startswith("n,seed,p,")


def test_env_cap_selects_standin(capsys, monkeypatch):
    monkeypatch.setenv("AMPFORGE_MAX_QUBITS", "6")
    code, out, _ = run(["transform", "--function", "sin", "--n", "3"], capsys)
    assert code == 0
