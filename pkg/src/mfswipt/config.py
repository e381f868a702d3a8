"""Experiment configuration: JSON in, validated scenario factories out.

Distances accept either meters (a number) or a string like "1.05Z" meaning a
multiple of the array's Rayleigh distance, which is how placements stay
meaningful when the array geometry changes. Angles come either as the
spatial angle directly ("angle", in [-1, 1]) or as a physical departure
angle in degrees ("aod_deg").
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .geometry import ArrayGeometry, Placement, spatial_angle_from_aod
from .model import EnergyReceiver, InfoReceiver, Scenario, build_compact
from .sca import SCAConfig


class ConfigError(Exception):
    """The configuration file is malformed or inconsistent."""


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(watts: float) -> float:
    if watts <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(watts / 1e-3)


_DISTANCE_RE = re.compile(r"^\s*([0-9.eE+-]+)\s*[zZ]\s*$")


def parse_distance(value, rayleigh: float) -> float:
    """Meters from a number, or from a 'xZ' multiple of the Rayleigh distance."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if isinstance(value, str):
        match = _DISTANCE_RE.match(value)
        if match:
            try:
                return float(match.group(1)) * rayleigh
            except ValueError:
                pass
        raise ConfigError(f"cannot parse distance {value!r} (use meters or e.g. '1.05Z')")
    raise ConfigError(f"cannot parse distance {value!r}")


@dataclass
class SweepSettings:
    rate_grid: list = field(default_factory=lambda: [2.0, 4.0, 6.0, 8.0, 10.0, 12.0, 14.0])
    id_counts: list = field(default_factory=lambda: [2, 3, 4, 5, 6])
    trials: int = 20
    seed: int = 2718
    angle_range: float = 0.8660254037844386
    distance_range_z: tuple = (1.05, 1.3)
    id_sweep_rate: float = 5.0


@dataclass
class ExperimentConfig:
    geometry: ArrayGeometry
    energy_receivers: list
    info_receivers: list
    power_budget: float
    harvest_efficiency: float
    rate_requirement: float
    sca: SCAConfig
    sweeps: SweepSettings

    def build_scenario(self, rate_requirement: float | None = None) -> Scenario:
        return Scenario(
            geometry=self.geometry,
            energy_receivers=list(self.energy_receivers),
            info_receivers=list(self.info_receivers),
            power_budget=self.power_budget,
            harvest_efficiency=self.harvest_efficiency,
            rate_requirement=self.rate_requirement
            if rate_requirement is None
            else rate_requirement,
        )

    def build_compact(self, rate_requirement: float | None = None):
        return build_compact(self.build_scenario(rate_requirement))


def _require(mapping: dict, key: str, context: str):
    if key not in mapping:
        raise ConfigError(f"missing {key!r} in {context}")
    return mapping[key]


def _angle_of(entry: dict, geom: ArrayGeometry, context: str) -> float:
    has_spatial = "angle" in entry
    has_aod = "aod_deg" in entry
    if has_spatial == has_aod:
        raise ConfigError(f"{context} needs exactly one of 'angle' or 'aod_deg'")
    if has_spatial:
        return float(entry["angle"])
    return spatial_angle_from_aod(geom, math.radians(float(entry["aod_deg"])))


def load_config(path) -> ExperimentConfig:
    """Parse and validate a JSON experiment description."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON in {path}: {exc}") from exc
    return parse_config(raw)


def parse_config(raw: dict) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigError("top-level config must be an object")
    array = _require(raw, "array", "config")
    try:
        geom = ArrayGeometry(
            n_antennas=int(_require(array, "n_antennas", "array")),
            element_spacing=float(_require(array, "element_spacing_m", "array")),
            wavelength=float(_require(array, "wavelength_m", "array")),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    rayleigh = geom.rayleigh_distance

    noise_default_dbm = float(raw.get("noise_power_dbm", -80.0))

    eh_entries = _require(raw, "energy_receivers", "config")
    id_entries = _require(raw, "info_receivers", "config")
    if not isinstance(eh_entries, list) or not eh_entries:
        raise ConfigError("'energy_receivers' must be a nonempty list")
    if not isinstance(id_entries, list) or not id_entries:
        raise ConfigError("'info_receivers' must be a nonempty list")

    energy = []
    for k, entry in enumerate(eh_entries):
        context = f"energy_receivers[{k}]"
        try:
            placement = Placement(
                angle=_angle_of(entry, geom, context),
                distance=parse_distance(_require(entry, "distance", context), rayleigh),
            )
            energy.append(EnergyReceiver(placement, weight=float(entry.get("weight", 1.0))))
        except ValueError as exc:
            raise ConfigError(f"{context}: {exc}") from exc

    info = []
    for m, entry in enumerate(id_entries):
        context = f"info_receivers[{m}]"
        noise_dbm = float(entry.get("noise_dbm", noise_default_dbm))
        try:
            placement = Placement(
                angle=_angle_of(entry, geom, context),
                distance=parse_distance(_require(entry, "distance", context), rayleigh),
            )
            info.append(InfoReceiver(placement, noise_power=dbm_to_watts(noise_dbm)))
        except ValueError as exc:
            raise ConfigError(f"{context}: {exc}") from exc

    sca_raw = raw.get("sca", {})
    sca = SCAConfig(
        max_iterations=int(sca_raw.get("max_iterations", 100)),
        convergence_ratio=float(sca_raw.get("convergence_ratio", 1e-3)),
        schedule_threshold_factor=float(sca_raw.get("schedule_threshold_factor", 1e-6)),
    )
    if sca.max_iterations < 1:
        raise ConfigError("sca.max_iterations must be at least 1")
    if sca.convergence_ratio <= 0.0:
        raise ConfigError("sca.convergence_ratio must be positive")

    sw_raw = raw.get("sweeps", {})
    defaults = SweepSettings()
    sweeps = SweepSettings(
        rate_grid=[float(r) for r in sw_raw.get("rate_grid", defaults.rate_grid)],
        id_counts=[int(m) for m in sw_raw.get("id_counts", defaults.id_counts)],
        trials=int(sw_raw.get("trials", defaults.trials)),
        seed=int(sw_raw.get("seed", defaults.seed)),
        angle_range=float(sw_raw.get("angle_range", defaults.angle_range)),
        distance_range_z=tuple(
            float(v) for v in sw_raw.get("distance_range_z", defaults.distance_range_z)
        ),
        id_sweep_rate=float(sw_raw.get("id_sweep_rate", defaults.id_sweep_rate)),
    )
    if sweeps.trials < 1:
        raise ConfigError("sweeps.trials must be at least 1")
    if not 0.0 < sweeps.angle_range <= 1.0:
        raise ConfigError("sweeps.angle_range must be in (0, 1]")
    if len(sweeps.distance_range_z) != 2 or not (
        1.0 <= sweeps.distance_range_z[0] < sweeps.distance_range_z[1]
    ):
        raise ConfigError("sweeps.distance_range_z must be [lo, hi] with 1 <= lo < hi")
    if any(m < 1 for m in sweeps.id_counts):
        raise ConfigError("sweeps.id_counts entries must be positive")

    try:
        power_budget = float(_require(raw, "power_budget_w", "config"))
        config = ExperimentConfig(
            geometry=geom,
            energy_receivers=energy,
            info_receivers=info,
            power_budget=power_budget,
            harvest_efficiency=float(raw.get("harvest_efficiency", 0.5)),
            rate_requirement=float(raw.get("rate_requirement_bits", 0.0)),
            sca=sca,
            sweeps=sweeps,
        )
        config.build_scenario()  # surface Scenario validation errors now
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    return config
