"""Tests for the experiment sweeps and the command-line front end."""

import csv
import json
import py_compile

import numpy as np
import pytest

from mfswipt.cli import main
from mfswipt.sweeps import (
    sample_info_receivers,
    sweep_id_count,
    sweep_rate,
    write_id_sweep,
    write_rate_sweep,
)

from conftest import BASELINE_CONFIG


@pytest.fixture()
def small_config_path(tmp_path):
    raw = json.loads(BASELINE_CONFIG.read_text())
    raw["sweeps"]["rate_grid"] = [2.0, 8.0]
    raw["sweeps"]["id_counts"] = [2, 3]
    raw["sweeps"]["trials"] = 2
    path = tmp_path / "small.json"
    path.write_text(json.dumps(raw))
    return path


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_rate_sweep_round_trips_through_exact_model(small_config_path, tmp_path):
    from mfswipt.config import load_config

    config = load_config(small_config_path)
    result = sweep_rate(config, schemes=("proposed", "as_epa"))
    out = tmp_path / "rate"
    paths = write_rate_sweep(result, out)
    rows = read_csv(paths[0])

    beam_cols = [c for c in rows[0] if c.startswith("p_")]
    assert beam_cols == ["p_eh1_w", "p_eh2_w", "p_eh3_w", "p_id1_w", "p_id2_w"]
    for col in ("harvested_dbm", "iterations", "status", "budget_used_w"):
        assert col in rows[0]

    for row in rows:
        if row["feasible"] != "true":
            continue
        cp = config.build_compact(rate_requirement=float(row["rate_req_bits"]))
        y = np.array([float(row[c]) for c in beam_cols])
        assert cp.sum_rate(y) == pytest.approx(float(row["exact_rate_bits"]), rel=1e-9)
        assert cp.harvested(y) == pytest.approx(float(row["harvested_w"]), rel=1e-9)
        assert y.sum() == pytest.approx(float(row["budget_used_w"]), rel=1e-9)


def test_id_sweep_library_level_deterministic(small_config_path, tmp_path):
    from mfswipt.config import load_config

    outs = []
    for tag in ("a", "b"):
        config = load_config(small_config_path)
        result = sweep_id_count(config, schemes=("proposed", "as_epa"))
        outs.append(write_id_sweep(result, tmp_path / tag))
    for first, second in zip(*outs):
        assert first.read_bytes() == second.read_bytes()


def test_id_sweep_csv_has_seed_column(small_config_path, tmp_path):
    from mfswipt.config import load_config

    config = load_config(small_config_path)
    result = sweep_id_count(config, schemes=("as_epa",))
    paths = write_id_sweep(result, tmp_path / "ids")
    rows = read_csv(paths[0])
    assert all(row["seed"] == "2718" for row in rows)
    assert {row["scheme"] for row in rows} == {"as_epa"}


def test_sample_info_receivers_nested_prefix(baseline_config):
    for trial in range(3):
        small = sample_info_receivers(baseline_config, trial, 3)
        large = sample_info_receivers(baseline_config, trial, 6)
        for a, b in zip(small, large):
            assert a.placement.angle == b.placement.angle
            assert a.placement.distance == b.placement.distance
        # distinct trials draw distinct sets
        other = sample_info_receivers(baseline_config, trial + 1, 3)
        assert other[0].placement.angle != small[0].placement.angle


def test_sampled_receivers_live_in_far_field(baseline_config):
    z = baseline_config.geometry.rayleigh_distance
    for trial in range(5):
        for rx in sample_info_receivers(baseline_config, trial, 6):
            assert rx.placement.distance >= 1.05 * z - 1e-9
            assert rx.placement.distance <= 1.3 * z + 1e-9
            assert abs(rx.placement.angle) <= baseline_config.sweeps.angle_range


def test_cli_solve_json(small_config_path, tmp_path, capsys):
    out = tmp_path / "solution.json"
    code = main(
        ["--config", str(small_config_path), "solve", "--rate", "8", "--out", str(out)]
    )
    assert code == 0
    doc = json.loads(out.read_text())
    assert doc["scheme"] == "proposed"
    assert doc["feasible"] is True
    assert doc["exact_rate_bits"] >= 8.0 - 1e-4
    assert doc["kernel_backend"] in ("fast", "ref")
    assert len(doc["powers_w"]) == 5
    assert doc["scheduled_eh"] == [True, False, False]


def test_cli_solve_strict_passes(small_config_path):
    code = main(["--config", str(small_config_path), "solve", "--rate", "6", "--strict"])
    assert code == 0


def test_cli_infeasible_rate_exits_3(small_config_path, capsys):
    code = main(["--config", str(small_config_path), "solve", "--rate", "14"])
    assert code == 3
    doc = json.loads(capsys.readouterr().out)
    assert doc["feasible"] is False


def test_cli_missing_config_exits_2(tmp_path, capsys):
    code = main(["--config", str(tmp_path / "absent.json"), "solve"])
    assert code == 2
    assert "config error" in capsys.readouterr().err


def test_cli_negative_rate_exits_2(small_config_path, capsys):
    code = main(["--config", str(small_config_path), "solve", "--rate", "-1"])
    assert code == 2


def test_cli_sweep_rate_writes_outputs(small_config_path, tmp_path, capsys):
    out = tmp_path / "rate_out"
    code = main(
        [
            "--config", str(small_config_path),
            "sweep-rate", "--out", str(out),
            "--scheme", "proposed", "--scheme", "as_epa",
        ]
    )
    assert code == 0
    assert (out / "rate_sweep.csv").exists()
    assert (out / "power_breakdown.csv").exists()
    script = out / "plot_results.py"
    assert script.exists()
    py_compile.compile(str(script), doraise=True)
    rows = read_csv(out / "rate_sweep.csv")
    assert {row["scheme"] for row in rows} == {"proposed", "as_epa"}


def test_cli_sweep_id_count_writes_outputs(small_config_path, tmp_path):
    out = tmp_path / "id_out"
    code = main(
        [
            "--config", str(small_config_path),
            "sweep-id-count", "--out", str(out),
            "--trials", "2", "--scheme", "as_epa",
        ]
    )
    assert code == 0
    assert (out / "id_sweep.csv").exists()
    assert (out / "id_sweep_trials.csv").exists()
    trials = read_csv(out / "id_sweep_trials.csv")
    assert len(trials) == 2 * 2  # two counts, two trials, one scheme


def test_cli_correlation_map(small_config_path, tmp_path, capsys):
    out = tmp_path / "corr_out"
    code = main(
        [
            "--config", str(small_config_path),
            "correlation-map", "--out", str(out),
            "--grid-size", "6",
        ]
    )
    assert code == 0
    rows = read_csv(out / "correlation_map.csv")
    assert len(rows) == 36
    errs = [float(r["abs_error"]) for r in rows]
    assert max(errs) < 0.15
    assert "correlation approximation error" in capsys.readouterr().out


def test_cli_rejects_bad_grid_size(small_config_path, tmp_path):
    code = main(
        [
            "--config", str(small_config_path),
            "correlation-map", "--out", str(tmp_path), "--grid-size", "1",
        ]
    )
    assert code == 2
