"""Convex subproblem: barrier path against slack elimination, KKT quality."""

import numpy as np
import pytest

from mfswipt.sca import _tight_slacks, initialize
from mfswipt.subproblem import (
    InfeasibleSubproblem,
    SolverOptions,
    eliminate_slacks_check,
    solve_subproblem,
)


def solve_random_instance(make_synthetic, seed):
    rng = np.random.default_rng(seed)
    cp = make_synthetic(rng, rate_frac=0.7)
    rp = cp.full_restriction()
    opts = SolverOptions()
    y0 = initialize(rp, opts)
    s0, i0 = _tight_slacks(rp, y0)
    report = solve_subproblem(rp, s0, i0, warm_start=y0, options=opts)
    check = eliminate_slacks_check(rp, s0, i0, warm_start=y0, options=opts)
    return report, check


def test_matches_slack_elimination(make_synthetic):
    worst = 0.0
    for seed in range(30):
        report, check = solve_random_instance(make_synthetic, seed)
        assert report.status == "optimal"
        rel = abs(report.objective_watts - check) / max(abs(check), 1e-30)
        worst = max(worst, rel)
        assert rel < 1e-6
        assert report.dual_residual < 1e-8
        assert report.complementarity < 1e-8
        assert report.primal_residual < 1e-8
    assert worst < 1e-6


def test_report_invariants(make_synthetic):
    report, _ = solve_random_instance(make_synthetic, 101)
    assert report.gap <= SolverOptions().gap_tolerance * 1.01
    assert report.n_outer >= 1
    assert report.n_newton >= report.n_outer
    assert report.backend in ("ref", "fast")
    assert np.all(report.y >= 0.0)
    assert np.all(report.s_slack > 0.0)
    assert np.all(report.i_slack > 0.0)


def test_warm_and_cold_barrier_agree(baseline_config):
    cp = baseline_config.build_compact(rate_requirement=8.0)
    rp = cp.full_restriction()
    opts = SolverOptions()
    y0 = initialize(rp, opts)
    s0, i0 = _tight_slacks(rp, y0)
    warm = solve_subproblem(rp, s0, i0, warm_start=y0, options=opts)
    cold = solve_subproblem(
        rp, s0, i0, warm_start=y0,
        options=SolverOptions(t_start_warm=1.0, t_start_cold=1.0),
    )
    assert cold.objective_watts == pytest.approx(warm.objective_watts, rel=1e-8)


def test_linear_path_without_rate(make_synthetic):
    rng = np.random.default_rng(55)
    cp = make_synthetic(rng, n_eh=3, n_id=2, rate_frac=0.0)
    rp = cp.full_restriction()
    report = solve_subproblem(rp)
    best = int(np.argmax(rp.q))
    assert report.y[best] == pytest.approx(cp.power_budget, rel=1e-6)
    others = np.delete(report.y, best)
    assert np.all(others < 1e-6 * cp.power_budget)


def test_anchors_required_with_rate(make_synthetic):
    rng = np.random.default_rng(56)
    cp = make_synthetic(rng, n_eh=2, n_id=1, rate_frac=0.5)
    rp = cp.full_restriction()
    with pytest.raises(ValueError):
        solve_subproblem(rp)


def test_rate_without_id_beams_infeasible(make_synthetic):
    rng = np.random.default_rng(57)
    cp = make_synthetic(rng, n_eh=2, n_id=1, rate_frac=0.5)
    rp = cp.restrict(np.array([True, True, False]))
    with pytest.raises(InfeasibleSubproblem):
        solve_subproblem(rp, np.zeros(0), np.zeros(0), warm_start=np.full(2, 0.3))


def test_budget_respected(make_synthetic):
    for seed in (7, 8, 9):
        report, _ = solve_random_instance(make_synthetic, seed)
        assert report.y.sum() <= 1.0 + 1e-9
