"""End-to-end command-line flows driven through main(argv)."""
import csv
import json
import os

import pytest

from cfeas.cli import EXIT_OK, EXIT_RUN_FAILURE, EXIT_USAGE, main


def test_gen_and_solve_instance(tmp_path, capsys):
    inst = str(tmp_path / "inst.json")
    rc = main(
        [
            "gen",
            "--family", "ellipsoids",
            "--n", "20",
            "--cond", "10.0",
            "--seed", "3",
            "--out", inst,
        ]
    )
    assert rc == EXIT_OK
    assert os.path.exists(inst)

    trace_out = str(tmp_path / "trace.csv")
    rc = main(
        [
            "solve",
            "--instance", inst,
            "--eps", "1e-8",
            "--trace-out", trace_out,
        ]
    )
    captured = capsys.readouterr()
    assert rc == EXIT_OK
    assert "status=converged" in captured.out
    with open(trace_out) as fh:
        rows = list(csv.DictReader(fh))
    assert rows and float(rows[-1]["delta"]) <= 1e-8


def test_solve_from_generator_args(capsys):
    rc = main(
        [
            "solve",
            "--family", "halfspace_wedge",
            "--n", "8",
            "--theta", "0.7",
            "--seed", "1",
            "--eps", "1e-10",
        ]
    )
    assert rc == EXIT_OK
    assert "iterations=" in capsys.readouterr().out


def test_solve_with_map_and_schedules(capsys):
    rc = main(
        [
            "solve",
            "--family", "ellipsoids",
            "--n", "15",
            "--cond", "5.0",
            "--tangency-gap", "0.05",
            "--method", "map",
            "--eps", "1e-6",
        ]
    )
    assert rc == EXIT_OK
    rc = main(
        [
            "solve",
            "--family", "ellipsoids",
            "--n", "15",
            "--cond", "5.0",
            "--schedule", "vanishing",
            "--eps", "1e-8",
        ]
    )
    assert rc == EXIT_OK
    rc = main(
        [
            "solve",
            "--family", "ellipsoids",
            "--n", "15",
            "--cond", "5.0",
            "--schedule", "table:0.5,0.3,0.1",
            "--eps", "1e-8",
        ]
    )
    assert rc == EXIT_OK


def test_solve_requires_instance_or_family(capsys):
    rc = main(["solve", "--eps", "1e-8"])
    assert rc == EXIT_USAGE


def test_solve_bad_schedule_is_usage_error(capsys):
    rc = main(
        ["solve", "--family", "ellipsoids", "--n", "10", "--schedule", "warmup:3"]
    )
    assert rc == EXIT_USAGE


def test_bench_print_schema(capsys):
    rc = main(["bench", "--print-schema"])
    assert rc == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["type"] == "object"


def test_bench_requires_config(capsys):
    rc = main(["bench"])
    assert rc == EXIT_USAGE


def test_bench_run_and_plotdata(tmp_path, capsys):
    config = {
        "generator": {
            "family": "ellipsoids",
            "n": 15,
            "cond": 5.0,
            "tangency_gap": 0.05,
        },
        "methods": [
            {"name": "crm", "schedule": {"kind": "constant", "alpha": 0.5}},
            {"name": "map", "method": "map"},
        ],
        "seeds": [0, 1],
        "eps": 1e-8,
        "output_dir": str(tmp_path / "default_out"),
    }
    cfg_path = str(tmp_path / "cfg.json")
    with open(cfg_path, "w") as fh:
        json.dump(config, fh)
    out = str(tmp_path / "run")
    rc = main(["bench", "--config", cfg_path, "--out", out, "--jobs", "2"])
    assert rc == EXIT_OK
    assert "crm:" in capsys.readouterr().out
    assert os.path.exists(os.path.join(out, "summary.csv"))

    plot = str(tmp_path / "plot.csv")
    rc = main(["plotdata", "--run-dir", out, "--out", plot])
    assert rc == EXIT_OK
    with open(plot) as fh:
        rows = list(csv.DictReader(fh))
    assert {r["method"] for r in rows} >= {"crm_0", "map_0"}


def test_bench_seed_range_override(tmp_path):
    config = {
        "generator": {
            "family": "ellipsoids",
            "n": 12,
            "cond": 5.0,
            "tangency_gap": 0.05,
        },
        "methods": [{"name": "crm"}],
        "seeds": [0],
        "eps": 1e-8,
    }
    cfg_path = str(tmp_path / "cfg.json")
    with open(cfg_path, "w") as fh:
        json.dump(config, fh)
    out = str(tmp_path / "run")
    rc = main(["bench", "--config", cfg_path, "--out", out, "--seed-range", "2..4"])
    assert rc == EXIT_OK
    names = sorted(os.listdir(out))
    assert "trace_crm_2.csv" in names and "trace_crm_4.csv" in names
    assert "trace_crm_0.csv" not in names


def test_plotdata_empty_dir_fails(tmp_path):
    rc = main(
        ["plotdata", "--run-dir", str(tmp_path), "--out", str(tmp_path / "p.csv")]
    )
    assert rc == EXIT_RUN_FAILURE


def test_oracle_check_command(capsys):
    rc = main(["oracle-check", "circumcenter", "--seed-range", "0..3"])
    assert rc == EXIT_OK
    doc = json.loads(capsys.readouterr().out)
    assert doc["ok"] is True
