"""Successive convex approximation over the compact design problem.

Each round linearizes the non-convex rate constraint around slack anchors,
solves the resulting convex subproblem to certificate grade, and re-anchors
at the subproblem's optimal slacks. The recovered schedule thresholds away
vanishing beams and, if that nicks the rate constraint, restores it by
shifting a bisected sliver of power from energy beams to the kept
information beams.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import CompactProblem, Schedule, recover_schedule
from .subproblem import (
    InfeasibleSubproblem,
    NumericalFailure,
    SolverOptions,
    SolverReport,
    solve_subproblem,
)

LOG2E = float(np.log2(np.e))


class ScheduleInfeasible(Exception):
    """No initialization candidate meets the rate requirement."""

    def __init__(self, message: str, best_rate: float = 0.0):
        super().__init__(message)
        self.best_rate = best_rate


@dataclass(frozen=True)
class SCAConfig:
    max_iterations: int = 100
    convergence_ratio: float = 1e-3
    schedule_threshold_factor: float = 1e-6
    rate_audit_slack: float = 1e-4
    budget_audit_slack: float = 1e-9
    solver: SolverOptions = field(default_factory=SolverOptions)


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    objective_watts: float
    exact_rate: float
    gap: float
    dual_residual: float
    complementarity: float
    newton_steps: int
    solver_status: str


@dataclass
class SolveResult:
    """Converged design: schedule, powers, and the audit trail."""

    schedule: Schedule
    powers: np.ndarray
    objective_watts: float
    exact_rate: float
    budget_used: float
    dropped_power: float
    iterations: int
    status: str
    trace: list
    budget_ok: bool
    rate_ok: bool
    notes: list


def r_low(s, i, s_anchor, i_anchor) -> float:
    """Tangent-plane lower bound on the sum rate at slacks (s, i).

    The per-receiver rate log2(1 + 1/(S I)) is jointly convex in (S, I), so
    its first-order expansion around the anchor bounds it from below; the
    bound is exact at the anchor and decreasing in both slacks.
    """
    s = np.asarray(s, dtype=float)
    i = np.asarray(i, dtype=float)
    s_t = np.asarray(s_anchor, dtype=float)
    i_t = np.asarray(i_anchor, dtype=float)
    anchor = np.log2(1.0 + 1.0 / (s_t * i_t))
    c_s = LOG2E / (s_t + s_t * s_t * i_t)
    c_i = LOG2E / (i_t + i_t * i_t * s_t)
    return float((anchor - c_s * (s - s_t) - c_i * (i - i_t)).sum())


def _tight_slacks(rp, y):
    s = 1.0 / (rp.id_gains * np.asarray(y, dtype=float)[rp.id_cols])
    i = rp.id_gains * (rp.a_rows @ y) + rp.noises
    return s, i


def initialize(rp, options: SolverOptions):
    """Feasible starting powers for a restriction, or ScheduleInfeasible.

    Tries equal split over all beams, equal split over the information
    beams, then full power on each single information beam, and keeps the
    candidate with the largest exact rate. Information beams are floored so
    the inverse-power slack fits its cap.
    """
    p0 = rp.power_budget
    nb = rp.n_beams
    floor = 2.0 / (options.inverse_power_cap * rp.id_gains)

    candidates = [np.full(nb, p0 / nb)]
    ids = rp.id_cols
    y = np.zeros(nb)
    y[ids] = p0 / len(ids)
    candidates.append(y)
    for j in ids:
        y = np.zeros(nb)
        y[j] = p0
        candidates.append(y)

    best, best_rate = None, -np.inf
    for cand in candidates:
        cand = cand.copy()
        cand[ids] = np.maximum(cand[ids], floor)
        total = cand.sum()
        if total > p0:
            cand *= p0 / total
        rate = rp.sum_rate(cand)
        if rate > best_rate:
            best, best_rate = cand, rate

    if best_rate < rp.rate_requirement + 1e-9:
        raise ScheduleInfeasible(
            f"no starting point meets the rate requirement "
            f"({best_rate:.6f} < {rp.rate_requirement:.6f} bits)",
            best_rate=best_rate,
        )
    return best


def _restore_rate(cp: CompactProblem, y, flags, rate_req):
    """Move power from energy beams to scheduled information beams until
    the exact rate clears rate_req again; None if even all of it is short."""
    idx_eh = np.flatnonzero(flags[: cp.n_eh])
    idx_id = cp.n_eh + np.flatnonzero(flags[cp.n_eh :])
    e_total = float(y[idx_eh].sum()) if len(idx_eh) else 0.0
    t_total = float(y[idx_id].sum()) if len(idx_id) else 0.0
    if t_total <= 0.0 or e_total <= 0.0:
        return None

    def shifted(x):
        out = y.copy()
        out[idx_eh] *= 1.0 - x
        out[idx_id] *= 1.0 + x * e_total / t_total
        return out

    if cp.sum_rate(shifted(1.0)) < rate_req:
        return None
    lo, hi = 0.0, 1.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if cp.sum_rate(shifted(mid)) >= rate_req:
            hi = mid
        else:
            lo = mid
        if hi - lo < 1e-16:
            break
    return shifted(hi)


def sca_solve(cp: CompactProblem, config: SCAConfig | None = None, keep=None) -> SolveResult:
    """Run the convex-approximation loop on a (possibly restricted) problem.

    Parameters
    ----------
    cp : CompactProblem
        Full problem; the result is always in full beam coordinates.
    keep : boolean mask, optional
        Scheduling restriction; unscheduled beams stay at zero power.

    Raises
    ------
    ScheduleInfeasible
        When no initialization candidate meets the rate requirement.
    """
    config = config or SCAConfig()
    if keep is None:
        keep = np.ones(cp.n_beams, dtype=bool)
    rp = cp.restrict(keep)
    notes: list = []
    trace: list = []

    has_rate = cp.rate_requirement > 0.0 and rp.n_id > 0
    if cp.rate_requirement > 0.0 and rp.n_id == 0:
        raise ScheduleInfeasible(
            "positive rate requirement with no information beams scheduled"
        )

    if not has_rate:
        # no coupling left: a single linear solve is exact
        report = solve_subproblem(rp, options=config.solver)
        y_sub = report.y
        status = "converged"
        iterations = 1
        trace.append(_record(1, report, rp))
    else:
        y_sub = initialize(rp, config.solver)
        s_t, i_t = _tight_slacks(rp, y_sub)
        q_prev = rp.objective(y_sub)
        status = "max_iterations"
        iterations = 0
        for it in range(1, config.max_iterations + 1):
            try:
                report = solve_subproblem(
                    rp, s_t, i_t, warm_start=y_sub, options=config.solver
                )
            except (InfeasibleSubproblem, NumericalFailure) as exc:
                if it == 1:
                    notes.append(f"first subproblem failed ({exc}); keeping start")
                    status = "solver_stalled"
                else:
                    notes.append(f"subproblem failed at round {it} ({exc})")
                    status = "converged"
                iterations = it - 1
                break
            iterations = it
            trace.append(_record(it, report, rp))
            y_sub = report.y
            s_t, i_t = report.s_slack, report.i_slack
            q_t = report.objective_watts
            if (q_t - q_prev) / max(q_prev, 1e-30) < config.convergence_ratio:
                status = "converged"
                break
            q_prev = q_t

    y = rp.embed(y_sub)
    threshold = config.schedule_threshold_factor * cp.power_budget
    rec = recover_schedule(y, threshold, cp.n_eh)
    y_rec = rec.powers
    dropped = float(rec.dropped_power.sum())

    if has_rate and cp.sum_rate(y_rec) < cp.rate_requirement:
        restored = _restore_rate(
            cp, y_rec, rec.schedule.flags, cp.rate_requirement
        )
        if restored is not None:
            notes.append("rate restored after threshold recovery")
            y_rec = restored
        else:
            # undo the information-beam drops; energy drops never cost rate
            undo = y_rec.copy()
            for j in range(cp.n_eh, cp.n_beams):
                if rec.dropped_power[j] > 0.0:
                    undo[j] = rec.dropped_power[j]
            notes.append("kept sub-threshold information beams to hold the rate")
            y_rec = undo
            dropped = float(rec.dropped_power[: cp.n_eh].sum())
            rec = recover_schedule(y_rec, 0.0, cp.n_eh)

    schedule = Schedule.from_flags(y_rec > 0.0, cp.n_eh)
    exact_rate = cp.sum_rate(y_rec)
    budget_used = float(y_rec.sum())
    return SolveResult(
        schedule=schedule,
        powers=y_rec,
        objective_watts=cp.harvested(y_rec),
        exact_rate=exact_rate,
        budget_used=budget_used,
        dropped_power=dropped,
        iterations=iterations,
        status=status,
        trace=trace,
        budget_ok=budget_used <= cp.power_budget + config.budget_audit_slack,
        rate_ok=exact_rate >= cp.rate_requirement - config.rate_audit_slack,
        notes=notes,
    )


def _record(it: int, report: SolverReport, rp) -> IterationRecord:
    return IterationRecord(
        iteration=it,
        objective_watts=report.objective_watts,
        exact_rate=rp.sum_rate(report.y),
        gap=report.gap,
        dual_residual=report.dual_residual,
        complementarity=report.complementarity,
        newton_steps=report.n_newton,
        solver_status=report.status,
    )
