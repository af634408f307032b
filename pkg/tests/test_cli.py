import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from risbound.cli import main
from risbound.model import ModelParameters
from risbound.scenarios import ScenarioSpec, generate_scenario, load_model, save_model

FAST_NIO = ["--nio-restarts", "2", "--nio-iters", "40"]


@pytest.fixture(scope="module")
def toy_path(tmp_path_factory):
    # single element, no coupling, no direct path: every bound and every
    # optimizer lands exactly on gain 1
    th = ModelParameters(
        alpha=-1.0, beta=1.0, h0=0.0, a=[1.0], b=[1.0], gamma=[[0.0]]
    )
    path = tmp_path_factory.mktemp("models") / "toy.json"
    save_model(th, path)
    return str(path)


@pytest.fixture(scope="module")
def singular_path(tmp_path_factory):
    # the v = 0 configuration makes I - diag(r) gamma exactly singular
    th = ModelParameters(
        alpha=1.0, beta=-1.0, h0=0.0, a=[1.0], b=[1.0], gamma=[[1.0]]
    )
    path = tmp_path_factory.mktemp("models") / "singular.json"
    save_model(th, path)
    return str(path)


def run_cli(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def parse_csv(text):
    return list(csv.DictReader(io.StringIO(text)))


def last_error_record(err):
    return json.loads(err.strip().splitlines()[-1])


def test_bound_toy_all_bounds_equal_one(capsys, toy_path):
    code, out, _ = run_cli(capsys, ["bound", "--model", toy_path, *FAST_NIO])
    assert code == 0
    rows = parse_csv(out)
    assert [r["method"] for r in rows] == ["ni", "nio", "ibd", "sdr"]
    for row in rows:
        assert row["scenario"] == "toy"
        assert row["kind"] == "bound"
        assert row["valid"] == "true"
        assert float(row["value"]) == pytest.approx(1.0, rel=1e-9)
        # default budget: 10 mW over 1e-5 mW noise
        assert float(row["capacity"]) == pytest.approx(np.log2(1 + 1e6), rel=1e-9)


def test_optimize_toy_all_methods_reach_one(capsys, toy_path):
    code, out, _ = run_cli(capsys, ["optimize", "--model", toy_path])
    assert code == 0
    rows = parse_csv(out)
    assert [r["method"] for r in rows] == ["es", "cd", "ga", "psdr"]
    for row in rows:
        assert row["kind"] == "gain"
        assert float(row["value"]) == pytest.approx(1.0, rel=1e-12)


def test_ibd_reports_na_for_non_unit_loads(capsys, toy_path):
    code, out, _ = run_cli(
        capsys, ["bound", "--model", toy_path, "--loads", "01", "--bounds", "ibd"]
    )
    assert code == 0  # inapplicable bound is a data row, not an error
    (row,) = parse_csv(out)
    assert row["load_set"] == "01"
    assert row["value"] == "nan"
    assert row["valid"] == "false"


def test_json_format_uses_null_for_nan(capsys, toy_path):
    code, out, _ = run_cli(
        capsys,
        ["bound", "--model", toy_path, "--loads", "01", "--bounds", "ibd,sdr",
         "--format", "json"],
    )
    assert code == 0
    records = json.loads(out)
    assert [rec["method"] for rec in records] == ["ibd", "sdr"]
    assert records[0]["value"] is None
    assert records[0]["capacity"] is None
    assert isinstance(records[1]["value"], float)


def test_gen_round_trips_to_generator(tmp_path, capsys):
    path = tmp_path / "gen.json"
    code, _, _ = run_cli(
        capsys,
        ["gen", "--ns", "4", "--seed", "11", "--direct-path", "random",
         "--out", str(path)],
    )
    assert code == 0
    th = load_model(path)
    ref = generate_scenario(ScenarioSpec(n_s=4, seed=11, direct_path="random"))
    assert th.h0 == ref.h0
    assert np.array_equal(th.a, ref.a)
    assert np.array_equal(th.b, ref.b)
    assert np.array_equal(th.gamma, ref.gamma)


def test_generated_scenario_without_model_file(capsys):
    code, out, _ = run_cli(
        capsys, ["bound", "--ns", "3", "--seed", "2", "--bounds", "ni,sdr"]
    )
    assert code == 0
    rows = parse_csv(out)
    assert rows[0]["scenario"] == "seed2-n3"
    assert rows[0]["n_s"] == "3"
    assert float(rows[0]["value"]) >= float(rows[1]["value"]) - 1e-9


def test_sweep_reduces_to_full_model_at_top_size(tmp_path, capsys):
    path = tmp_path / "m.json"
    run_cli(capsys, ["gen", "--ns", "3", "--seed", "5", "--out", str(path)])
    code, out, _ = run_cli(
        capsys,
        ["sweep", "--model", str(path), "--ns", "3,1", "--bounds", "ni",
         "--methods", "es"],
    )
    assert code == 0
    rows = parse_csv(out)
    assert [(r["n_s"], r["method"]) for r in rows] == [
        ("1", "ni"), ("1", "es"), ("3", "ni"), ("3", "es"),
    ]
    code, out, _ = run_cli(
        capsys, ["bound", "--model", str(path), "--bounds", "ni"]
    )
    (full,) = parse_csv(out)
    assert float(rows[2]["value"]) == pytest.approx(float(full["value"]), rel=1e-12)


def test_sweep_parallel_matches_serial(tmp_path, capsys):
    path = tmp_path / "m.json"
    run_cli(capsys, ["gen", "--ns", "4", "--seed", "6", "--out", str(path)])
    base = ["sweep", "--model", str(path), "--ns", "1,2,4", "--bounds", "ni,sdr",
            "--methods", "es"]
    _, serial, _ = run_cli(capsys, base)
    _, parallel, _ = run_cli(capsys, base + ["--jobs", "3"])
    strip = lambda text: [row[:-1] for row in csv.reader(io.StringIO(text))]
    # identical rows apart from wall-clock runtimes
    assert strip(serial) == strip(parallel)


def test_sweep_requires_model(capsys):
    code, _, err = run_cli(capsys, ["sweep", "--ns", "1,2"])
    assert code == 2
    assert "model" in last_error_record(err)["message"]


def test_sweep_rejects_oversized_points(tmp_path, capsys, toy_path):
    code, _, err = run_cli(
        capsys, ["sweep", "--model", toy_path, "--ns", "1,5", "--bounds", "ni"]
    )
    assert code == 2
    assert "exceed" in last_error_record(err)["message"]


def test_missing_model_file_is_config_error(capsys):
    code, _, err = run_cli(capsys, ["bound", "--model", "/no/such/file.json"])
    assert code == 2
    record = last_error_record(err)
    assert record["error"] == "FileNotFoundError"
    assert record["message"]


def test_unknown_bound_name_is_config_error(capsys, toy_path):
    code, _, err = run_cli(
        capsys, ["bound", "--model", toy_path, "--bounds", "ni,tight"]
    )
    assert code == 2
    assert "tight" in last_error_record(err)["message"]


def test_oversized_search_is_config_error(capsys):
    code, _, err = run_cli(
        capsys, ["optimize", "--ns", "40", "--seed", "0", "--methods", "es"]
    )
    assert code == 2
    assert last_error_record(err)["error"] == "TooLarge"


@pytest.mark.filterwarnings("ignore::scipy.linalg.LinAlgWarning")
def test_singular_model_is_numerical_error(capsys, singular_path):
    code, _, err = run_cli(
        capsys, ["optimize", "--model", singular_path, "--methods", "cd"]
    )
    assert code == 3
    record = last_error_record(err)
    assert record["error"] in ("SingularResolvent", "SingularUpdate", "LinAlgError")


def test_malformed_model_is_config_error(tmp_path, capsys):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = run_cli(capsys, ["bound", "--model", str(path)])
    assert code == 2
    assert last_error_record(err)["error"] == "ParseError"


def test_verify_small_run_passes(tmp_path, capsys):
    out1 = tmp_path / "v1.csv"
    out2 = tmp_path / "v2.csv"
    code, _, err = run_cli(
        capsys, ["verify", "--seed", "3", "--count", "1", "--out", str(out1)]
    )
    assert code == 0
    assert "verification passed" in err
    code, _, _ = run_cli(
        capsys, ["verify", "--seed", "3", "--count", "1", "--out", str(out2)]
    )
    assert code == 0
    assert out1.read_bytes() == out2.read_bytes()
    rows = parse_csv(out1.read_text())
    assert rows and "runtime_s" not in rows[0]


def test_help_exits_zero(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--help"])
    assert exc.value.code == 0


def test_module_entry_point():
    out = subprocess.run(
        [sys.executable, "-m", "risbound", "--help"],
        capture_output=True, text=True,
    )
    assert out.returncode == 0
    assert "usage" in out.stdout
