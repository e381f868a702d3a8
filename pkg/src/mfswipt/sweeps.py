"""Experiment sweeps over the rate requirement and the receiver count.

Every sweep is deterministic: randomized trials draw from a generator seeded
by (seed, trial index), and a trial's receiver set for m receivers is the
first m entries of that trial's master draw, so growing the count only ever
adds receivers. CSV cells are written with a fixed %.12g format, making
repeat runs byte-identical.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ExperimentConfig, watts_to_dbm
from .correlation import correlation_approx, correlation_exact
from .geometry import Placement
from .model import InfoReceiver, Scenario, build_compact
from .schemes import SCHEME_NAMES, SchemeResult, run_scheme

RATE_SWEEP_SCHEMES = SCHEME_NAMES
ID_SWEEP_SCHEMES = ("proposed", "gs_opa", "os_epa", "as_epa")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), ".12g")
    return str(value)


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


@dataclass
class RateSweepResult:
    rates: list
    schemes: tuple
    results: dict  # (rate, scheme) -> SchemeResult
    n_eh: int
    n_id: int

    def rows(self):
        for rate in self.rates:
            for scheme in self.schemes:
                r: SchemeResult = self.results[(rate, scheme)]
                dbm = watts_to_dbm(r.objective_watts) if r.objective_watts > 0 else float("-inf")
                yield (
                    rate,
                    scheme,
                    r.feasible,
                    r.objective_watts,
                    dbm,
                    r.exact_rate,
                    r.budget_used,
                    int(r.detail.get("iterations", 0)),
                    r.status,
                    *r.powers,
                )

    def breakdown_rows(self):
        for rate in self.rates:
            r: SchemeResult = self.results[(rate, "proposed")]
            yield (rate, r.feasible, r.objective_watts, r.exact_rate, *r.powers)


def sweep_rate(config: ExperimentConfig, schemes=RATE_SWEEP_SCHEMES) -> RateSweepResult:
    """Run every scheme at every rate requirement on the configured scenario."""
    results = {}
    for rate in config.sweeps.rate_grid:
        cp = config.build_compact(rate_requirement=rate)
        for scheme in schemes:
            results[(rate, scheme)] = run_scheme(cp, scheme, config.sca)
    scenario = config.build_scenario()
    return RateSweepResult(
        rates=list(config.sweeps.rate_grid),
        schemes=tuple(schemes),
        results=results,
        n_eh=scenario.n_eh,
        n_id=scenario.n_id,
    )


def write_rate_sweep(result: RateSweepResult, out_dir) -> list:
    out_dir = Path(out_dir)
    beam_cols = [f"p_eh{k + 1}_w" for k in range(result.n_eh)] + [
        f"p_id{m + 1}_w" for m in range(result.n_id)
    ]
    sweep_path = out_dir / "rate_sweep.csv"
    write_csv(
        sweep_path,
        ["rate_req_bits", "scheme", "feasible", "harvested_w", "harvested_dbm",
         "exact_rate_bits", "budget_used_w", "iterations", "status", *beam_cols],
        result.rows(),
    )
    breakdown_path = out_dir / "power_breakdown.csv"
    write_csv(
        breakdown_path,
        ["rate_req_bits", "feasible", "harvested_w", "exact_rate_bits", *beam_cols],
        result.breakdown_rows(),
    )
    return [sweep_path, breakdown_path]


@dataclass
class IdSweepResult:
    id_counts: list
    schemes: tuple
    rate_requirement: float
    trials: int
    seed: int
    trial_results: dict  # (id_count, scheme, trial) -> SchemeResult
    aggregates: dict = field(default_factory=dict)  # (id_count, scheme) -> mean

    def trial_rows(self):
        for count in self.id_counts:
            for scheme in self.schemes:
                for j in range(self.trials):
                    r: SchemeResult = self.trial_results[(count, scheme, j)]
                    yield (
                        count,
                        scheme,
                        j,
                        r.feasible,
                        r.objective_watts,
                        r.exact_rate,
                        r.status,
                    )

    def aggregate_rows(self):
        for count in self.id_counts:
            for scheme in self.schemes:
                qs = [
                    self.trial_results[(count, scheme, j)].objective_watts
                    for j in range(self.trials)
                ]
                feas = sum(
                    1
                    for j in range(self.trials)
                    if self.trial_results[(count, scheme, j)].feasible
                )
                yield (
                    count,
                    scheme,
                    float(np.mean(qs)),
                    float(np.min(qs)),
                    float(np.max(qs)),
                    feas,
                    self.trials,
                    self.seed,
                )


def sample_info_receivers(config: ExperimentConfig, trial: int, count: int) -> list:
    """The first `count` receivers of this trial's master draw.

    Angles are uniform over the configured spatial-angle range, distances
    uniform over the configured multiples of the Rayleigh distance; the
    noise power of the first configured receiver applies to all of them.
    """
    sweeps = config.sweeps
    max_count = max(max(sweeps.id_counts), count)
    rng = np.random.default_rng([sweeps.seed, trial])
    angles = rng.uniform(-sweeps.angle_range, sweeps.angle_range, size=max_count)
    lo, hi = sweeps.distance_range_z
    z = config.geometry.rayleigh_distance
    distances = rng.uniform(lo, hi, size=max_count) * z
    noise = config.info_receivers[0].noise_power
    return [
        InfoReceiver(Placement(float(a), float(r)), noise_power=noise)
        for a, r in zip(angles[:count], distances[:count])
    ]


def sweep_id_count(config: ExperimentConfig, schemes=ID_SWEEP_SCHEMES) -> IdSweepResult:
    """Mean harvested power versus the number of information receivers."""
    sweeps = config.sweeps
    rate = sweeps.id_sweep_rate
    trial_results = {}
    for count in sweeps.id_counts:
        for j in range(sweeps.trials):
            scenario = Scenario(
                geometry=config.geometry,
                energy_receivers=list(config.energy_receivers),
                info_receivers=sample_info_receivers(config, j, count),
                power_budget=config.power_budget,
                harvest_efficiency=config.harvest_efficiency,
                rate_requirement=rate,
            )
            cp = build_compact(scenario)
            for scheme in schemes:
                trial_results[(count, scheme, j)] = run_scheme(cp, scheme, config.sca)
    return IdSweepResult(
        id_counts=list(sweeps.id_counts),
        schemes=tuple(schemes),
        rate_requirement=rate,
        trials=sweeps.trials,
        seed=sweeps.seed,
        trial_results=trial_results,
    )


def write_id_sweep(result: IdSweepResult, out_dir) -> list:
    out_dir = Path(out_dir)
    agg_path = out_dir / "id_sweep.csv"
    write_csv(
        agg_path,
        ["id_count", "scheme", "mean_harvested_w", "min_harvested_w",
         "max_harvested_w", "feasible_trials", "trials", "seed"],
        result.aggregate_rows(),
    )
    trials_path = out_dir / "id_sweep_trials.csv"
    write_csv(
        trials_path,
        ["id_count", "scheme", "trial", "feasible", "harvested_w",
         "exact_rate_bits", "status"],
        result.trial_rows(),
    )
    return [agg_path, trials_path]


def correlation_map(
    config: ExperimentConfig, n_theta: int = 50, n_dist: int = 50
):
    """Exact and approximate beam correlation against the first energy receiver.

    The grid spans the configured array's focusing region: spatial angles in
    [-0.9, 0.9] and distances log-spaced between the Fresnel boundary and the
    Rayleigh distance.
    """
    geom = config.geometry
    ref = config.energy_receivers[0].placement
    thetas = np.linspace(-0.9, 0.9, n_theta)
    dists = np.geomspace(geom.fresnel_region_min, geom.rayleigh_distance, n_dist)
    rows = []
    for theta in thetas:
        for dist in dists:
            probe = Placement(float(theta), float(dist))
            exact = correlation_exact(geom, ref, "near", probe, "near")
            approx = correlation_approx(geom, ref, "near", probe, "near")
            rows.append((theta, dist, exact, approx, abs(exact - approx)))
    return rows


def write_correlation_map(rows, out_dir) -> list:
    path = Path(out_dir) / "correlation_map.csv"
    write_csv(
        path,
        ["spatial_angle", "distance_m", "corr_exact", "corr_approx", "abs_error"],
        rows,
    )
    return [path]


PLOT_SCRIPT = '''"""Plot the sweep CSVs living next to this script (needs matplotlib)."""

import csv
from collections import defaultdict
from pathlib import Path

import matplotlib.pyplot as plt

HERE = Path(__file__).resolve().parent


def read(name):
    with (HERE / name).open() as fh:
        return list(csv.DictReader(fh))


def plot_rate_sweep(ax):
    rows = read("rate_sweep.csv")
    series = defaultdict(list)
    for row in rows:
        if row["feasible"] == "true":
            series[row["scheme"]].append(
                (float(row["rate_req_bits"]), float(row["harvested_w"]))
            )
    for scheme, pts in series.items():
        pts.sort()
        ax.plot([p[0] for p in pts], [1e6 * p[1] for p in pts], marker="o", label=scheme)
    ax.set_xlabel("rate requirement (bits/s/Hz)")
    ax.set_ylabel("harvested power (uW)")
    ax.legend()
    ax.grid(True, alpha=0.3)


def plot_id_sweep(ax):
    rows = read("id_sweep.csv")
    series = defaultdict(list)
    for row in rows:
        series[row["scheme"]].append(
            (int(row["id_count"]), 1e6 * float(row["mean_harvested_w"]))
        )
    for scheme, pts in series.items():
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="s", label=scheme)
    ax.set_xlabel("information receivers")
    ax.set_ylabel("mean harvested power (uW)")
    ax.legend()
    ax.grid(True, alpha=0.3)


def main():
    panels = []
    if (HERE / "rate_sweep.csv").exists():
        panels.append(plot_rate_sweep)
    if (HERE / "id_sweep.csv").exists():
        panels.append(plot_id_sweep)
    if not panels:
        raise SystemExit("no sweep CSVs found next to this script")
    fig, axes = plt.subplots(1, len(panels), figsize=(6 * len(panels), 4.5))
    if len(panels) == 1:
        axes = [axes]
    for panel, ax in zip(panels, axes):
        panel(ax)
    fig.tight_layout()
    out = HERE / "sweeps.png"
    fig.savefig(out, dpi=150)
    print(f"wrote {out}")


if __name__ == "__main__":
    main()
'''


def emit_plot_script(out_dir) -> Path:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / "plot_results.py"
    path.write_text(PLOT_SCRIPT)
    return path
