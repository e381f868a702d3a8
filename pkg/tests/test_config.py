"""Tests for configuration parsing and unit conversions."""

import json
import math

import numpy as np
import pytest

from mfswipt.config import (
    ConfigError,
    dbm_to_watts,
    load_config,
    parse_config,
    parse_distance,
    watts_to_dbm,
)

from conftest import BASELINE_CONFIG


def minimal_raw(**overrides):
    raw = {
        "array": {"n_antennas": 256, "element_spacing_m": 0.005, "wavelength_m": 0.01},
        "power_budget_w": 1.0,
        "energy_receivers": [{"angle": 0.0, "distance": "0.02Z"}],
        "info_receivers": [{"angle": 0.1, "distance": "1.1Z"}],
    }
    raw.update(overrides)
    return raw


def test_baseline_config_loads(baseline_config):
    geom = baseline_config.geometry
    assert geom.n_antennas == 256
    assert geom.rayleigh_distance == pytest.approx(327.68)

    eh = baseline_config.energy_receivers
    assert len(eh) == 3
    assert eh[0].placement.distance == pytest.approx(0.015 * 327.68)
    assert eh[0].placement.angle == 0.0
    assert all(r.weight == 1.0 for r in eh)

    info = baseline_config.info_receivers
    assert len(info) == 2
    assert info[0].noise_power == pytest.approx(1e-11)

    sw = baseline_config.sweeps
    assert sw.rate_grid == [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0]
    assert sw.id_counts == [2, 3, 4, 5, 6]
    assert sw.trials == 20
    assert sw.id_sweep_rate == 5.0


def test_dbm_round_trip():
    for dbm in np.linspace(-120.0, 40.0, 33):
        assert watts_to_dbm(dbm_to_watts(dbm)) == pytest.approx(dbm, abs=1e-12)
    assert dbm_to_watts(-80.0) == pytest.approx(1e-11)
    with pytest.raises(ValueError):
        watts_to_dbm(0.0)


def test_parse_distance():
    assert parse_distance(5.25, 100.0) == 5.25
    assert parse_distance("1.05Z", 100.0) == pytest.approx(105.0)
    assert parse_distance("2z", 100.0) == pytest.approx(200.0)
    for bad in ["near", "Z1.05", "", None, True]:
        with pytest.raises(ConfigError):
            parse_distance(bad, 100.0)


def test_aod_degrees_maps_to_spatial_angle():
    raw = minimal_raw(
        info_receivers=[{"aod_deg": 60.0, "distance": "1.1Z"}],
    )
    cfg = parse_config(raw)
    assert cfg.info_receivers[0].placement.angle == pytest.approx(0.5)


def test_angle_keys_exclusive():
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config(
            minimal_raw(
                energy_receivers=[{"angle": 0.0, "aod_deg": 90.0, "distance": "0.02Z"}]
            )
        )
    with pytest.raises(ConfigError, match="exactly one"):
        parse_config(minimal_raw(energy_receivers=[{"distance": "0.02Z"}]))


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.json")
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError, match="invalid JSON"):
        load_config(bad)


def test_energy_receiver_beyond_near_field_rejected():
    with pytest.raises(ConfigError):
        parse_config(minimal_raw(energy_receivers=[{"angle": 0.0, "distance": "1.5Z"}]))


def test_info_receiver_inside_near_field_rejected():
    with pytest.raises(ConfigError):
        parse_config(minimal_raw(info_receivers=[{"angle": 0.0, "distance": "0.5Z"}]))


def test_per_receiver_noise_override():
    raw = minimal_raw(
        info_receivers=[
            {"angle": 0.1, "distance": "1.1Z"},
            {"angle": 0.2, "distance": "1.2Z", "noise_dbm": -90.0},
        ]
    )
    cfg = parse_config(raw)
    assert cfg.info_receivers[0].noise_power == pytest.approx(1e-11)
    assert cfg.info_receivers[1].noise_power == pytest.approx(1e-12)


def test_sweep_validation():
    with pytest.raises(ConfigError, match="trials"):
        parse_config(minimal_raw(sweeps={"trials": 0}))
    with pytest.raises(ConfigError, match="angle_range"):
        parse_config(minimal_raw(sweeps={"angle_range": 1.5}))
    with pytest.raises(ConfigError, match="distance_range_z"):
        parse_config(minimal_raw(sweeps={"distance_range_z": [0.9, 1.2]}))
    with pytest.raises(ConfigError, match="id_counts"):
        parse_config(minimal_raw(sweeps={"id_counts": [0, 2]}))


def test_baseline_file_is_self_consistent(baseline_config):
    # the checked-in file and a re-parse of its raw JSON agree
    raw = json.loads(BASELINE_CONFIG.read_text())
    cfg = parse_config(raw)
    assert cfg.power_budget == baseline_config.power_budget
    assert cfg.rate_requirement == baseline_config.rate_requirement
    assert cfg.harvest_efficiency == baseline_config.harvest_efficiency
    assert len(cfg.energy_receivers) == len(baseline_config.energy_receivers)


def test_rejects_non_object_and_empty_lists():
    with pytest.raises(ConfigError):
        parse_config([1, 2, 3])
    with pytest.raises(ConfigError, match="energy_receivers"):
        parse_config(minimal_raw(energy_receivers=[]))
    with pytest.raises(ConfigError, match="missing"):
        raw = minimal_raw()
        del raw["power_budget_w"]
        parse_config(raw)


def test_spatial_angle_still_validated():
    with pytest.raises(ConfigError):
        parse_config(minimal_raw(info_receivers=[{"angle": 1.4, "distance": "1.1Z"}]))
