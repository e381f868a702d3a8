"""Command-line front end.

Subcommands
-----------
solve            one scheme on the configured scenario, JSON result
sweep-rate       all schemes across the configured rate grid, CSVs
sweep-id-count   randomized receiver-count sweep, CSVs
correlation-map  exact vs approximate beam correlation grid, CSV

Exit codes: 0 success, 2 configuration problem, 3 infeasible design,
4 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from ._kernels import BACKEND
from .config import ConfigError, load_config
from .schemes import SCHEME_NAMES, CapExceeded, run_scheme
from .subproblem import NumericalFailure
from .sweeps import (
    ID_SWEEP_SCHEMES,
    RATE_SWEEP_SCHEMES,
    correlation_map,
    emit_plot_script,
    sweep_id_count,
    sweep_rate,
    write_correlation_map,
    write_id_sweep,
    write_rate_sweep,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mfswipt",
        description="Joint beam scheduling and power allocation for mixed "
        "near/far-field wireless power and information transfer.",
    )
    parser.add_argument(
        "--config", required=True, type=Path, help="experiment JSON file"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="run one scheme on the scenario")
    p_solve.add_argument(
        "--scheme", choices=SCHEME_NAMES, default="proposed", help="design scheme"
    )
    p_solve.add_argument(
        "--rate", type=float, default=None, help="override the rate requirement"
    )
    p_solve.add_argument(
        "--out", type=Path, default=None, help="write the JSON result here"
    )
    p_solve.add_argument(
        "--strict",
        action="store_true",
        help="fail (exit 4) unless the result passes its feasibility audits",
    )

    p_rate = sub.add_parser("sweep-rate", help="sweep the rate requirement")
    p_rate.add_argument("--out", type=Path, required=True, help="output directory")
    p_rate.add_argument(
        "--scheme",
        choices=SCHEME_NAMES,
        action="append",
        default=None,
        help="restrict to a scheme (repeatable)",
    )

    p_id = sub.add_parser("sweep-id-count", help="sweep the receiver count")
    p_id.add_argument("--out", type=Path, required=True, help="output directory")
    p_id.add_argument(
        "--scheme",
        choices=SCHEME_NAMES,
        action="append",
        default=None,
        help="restrict to a scheme (repeatable)",
    )
    p_id.add_argument(
        "--seed", type=int, default=None, help="override the sweep seed"
    )
    p_id.add_argument(
        "--trials", type=int, default=None, help="override the trial count"
    )

    p_corr = sub.add_parser(
        "correlation-map", help="beam-correlation accuracy grid"
    )
    p_corr.add_argument("--out", type=Path, required=True, help="output directory")
    p_corr.add_argument(
        "--grid-size", type=int, default=50, help="points per grid axis"
    )
    return parser


def _result_document(result, config) -> dict:
    doc = {
        "scheme": result.scheme,
        "feasible": result.feasible,
        "status": result.status,
        "harvested_w": result.objective_watts,
        "exact_rate_bits": result.exact_rate,
        "budget_used_w": result.budget_used,
        "powers_w": [float(p) for p in result.powers],
        "kernel_backend": BACKEND,
    }
    if result.schedule is not None:
        doc["scheduled_eh"] = [bool(f) for f in result.schedule.eh]
        doc["scheduled_id"] = [bool(f) for f in result.schedule.info]
    doc.update(
        {
            k: v
            for k, v in result.detail.items()
            if isinstance(v, (int, float, str, list))
        }
    )
    doc["rate_requirement_bits"] = config.rate_requirement
    return doc


def _cmd_solve(args, config) -> int:
    if args.rate is not None:
        if args.rate < 0:
            print("rate override must be nonnegative", file=sys.stderr)
            return EXIT_CONFIG
        config.rate_requirement = args.rate
    cp = config.build_compact()
    result = run_scheme(cp, args.scheme, config.sca)
    doc = _result_document(result, config)
    text = json.dumps(doc, indent=2)
    if args.out is not None:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(text + "\n")
        print(f"wrote {args.out}")
    else:
        print(text)
    if not result.feasible:
        return EXIT_INFEASIBLE
    if args.strict:
        audits_ok = result.status in ("converged", "ok")
        if result.scheme == "proposed" or result.scheme == "exhaustive" or result.scheme == "gs_opa":
            budget_ok = result.budget_used <= config.power_budget + 1e-9
            rate_ok = result.exact_rate >= config.rate_requirement - 1e-4
            audits_ok = audits_ok and budget_ok and rate_ok
        if not audits_ok:
            print("strict mode: result failed its audits", file=sys.stderr)
            return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_sweep_rate(args, config) -> int:
    schemes = tuple(args.scheme) if args.scheme else RATE_SWEEP_SCHEMES
    result = sweep_rate(config, schemes)
    paths = write_rate_sweep(result, args.out)
    paths.append(emit_plot_script(args.out))
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_sweep_id(args, config) -> int:
    if args.seed is not None:
        config.sweeps.seed = args.seed
    if args.trials is not None:
        if args.trials < 1:
            print("--trials must be at least 1", file=sys.stderr)
            return EXIT_CONFIG
        config.sweeps.trials = args.trials
    schemes = tuple(args.scheme) if args.scheme else ID_SWEEP_SCHEMES
    result = sweep_id_count(config, schemes)
    paths = write_id_sweep(result, args.out)
    paths.append(emit_plot_script(args.out))
    for path in paths:
        print(f"wrote {path}")
    return EXIT_OK


def _cmd_correlation_map(args, config) -> int:
    if args.grid_size < 2:
        print("--grid-size must be at least 2", file=sys.stderr)
        return EXIT_CONFIG
    rows = correlation_map(config, args.grid_size, args.grid_size)
    paths = write_correlation_map(rows, args.out)
    for path in paths:
        print(f"wrote {path}")
    errors = np.array([row[4] for row in rows])
    print(
        f"correlation approximation error: mean {errors.mean():.3e}, "
        f"max {errors.max():.3e} over {len(rows)} grid points"
    )
    return EXIT_OK


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "solve":
            return _cmd_solve(args, config)
        if args.command == "sweep-rate":
            return _cmd_sweep_rate(args, config)
        if args.command == "sweep-id-count":
            return _cmd_sweep_id(args, config)
        if args.command == "correlation-map":
            return _cmd_correlation_map(args, config)
    except (NumericalFailure, CapExceeded) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    raise AssertionError("unreachable command")


if __name__ == "__main__":
    sys.exit(main())
