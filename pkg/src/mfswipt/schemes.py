"""The proposed design and the benchmark schemes it is compared against.

All schemes answer the same question (which beams to schedule, how much
power each gets) and report through a common result type so sweeps and the
CLI can treat them uniformly:

  proposed     joint scheduling and power allocation via the SCA loop
  exhaustive   SCA power allocation on every schedule, best kept
  gs_opa       greedy one-EH one-ID schedule, then SCA power allocation
  os_epa       best schedule under equal power split
  as_epa       everything scheduled, equal power split
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .model import CompactProblem, Schedule
from .sca import SCAConfig, ScheduleInfeasible, sca_solve
from .subproblem import NumericalFailure

EXHAUSTIVE_CAP = 16

SCHEME_NAMES = ("proposed", "exhaustive", "gs_opa", "os_epa", "as_epa")


class CapExceeded(Exception):
    """Subset enumeration was asked to cover more beams than the cap."""


@dataclass
class SchemeResult:
    scheme: str
    feasible: bool
    schedule: Schedule | None
    powers: np.ndarray
    objective_watts: float
    exact_rate: float
    budget_used: float
    status: str
    detail: dict = field(default_factory=dict)


def _infeasible(cp: CompactProblem, scheme: str, status: str, **detail) -> SchemeResult:
    return SchemeResult(
        scheme=scheme,
        feasible=False,
        schedule=None,
        powers=np.zeros(cp.n_beams),
        objective_watts=0.0,
        exact_rate=0.0,
        budget_used=0.0,
        status=status,
        detail=detail,
    )


def _from_solve(cp: CompactProblem, scheme: str, res) -> SchemeResult:
    return SchemeResult(
        scheme=scheme,
        feasible=True,
        schedule=res.schedule,
        powers=res.powers,
        objective_watts=res.objective_watts,
        exact_rate=res.exact_rate,
        budget_used=res.budget_used,
        status=res.status,
        detail={"iterations": res.iterations, "notes": list(res.notes)},
    )


def proposed(cp: CompactProblem, config: SCAConfig | None = None) -> SchemeResult:
    """Joint design on the full schedule; thresholding does the scheduling."""
    try:
        res = sca_solve(cp, config)
    except ScheduleInfeasible as exc:
        return _infeasible(cp, "proposed", "infeasible", best_rate=exc.best_rate)
    return _from_solve(cp, "proposed", res)


def exhaustive_search(
    cp: CompactProblem, config: SCAConfig | None = None, cap: int = EXHAUSTIVE_CAP
) -> SchemeResult:
    """SCA power allocation on every nonempty schedule, keep the best.

    Subsets are visited in ascending bitmask order (bit j = beam j) and ties
    go to the first maximizer, so the outcome is deterministic. Raises
    CapExceeded beyond ``cap`` beams; the count grows as 2^n.
    """
    n = cp.n_beams
    if n > cap:
        raise CapExceeded(f"{n} beams would need {2 ** n - 1} schedules (cap {cap})")
    need_id = cp.rate_requirement > 0.0
    id_mask_bits = ((1 << cp.n_id) - 1) << cp.n_eh

    best: SchemeResult | None = None
    evaluated = feasible_count = failures = 0
    for mask in range(1, 1 << n):
        if need_id and not (mask & id_mask_bits):
            continue
        keep = np.array([(mask >> j) & 1 == 1 for j in range(n)])
        evaluated += 1
        try:
            res = sca_solve(cp, config, keep=keep)
        except ScheduleInfeasible:
            continue
        except NumericalFailure:
            failures += 1
            continue
        feasible_count += 1
        if best is None or res.objective_watts > best.objective_watts:
            best = _from_solve(cp, "exhaustive", res)
    if best is None:
        return _infeasible(
            cp, "exhaustive", "infeasible", evaluated=evaluated, failures=failures
        )
    best.detail.update(
        evaluated=evaluated, feasible_count=feasible_count, failures=failures
    )
    return best


def greedy_opa(cp: CompactProblem, config: SCAConfig | None = None) -> SchemeResult:
    """Schedule the strongest receiver of each kind, then allocate power.

    Strongest means the largest weighted harvesting gain on the energy side
    and the largest gain-to-noise ratio on the information side; first index
    wins ties. Power over the pair is optimized with the same SCA loop.
    """
    eh_score = cp.c_eh[: cp.n_eh]
    id_score = cp.id_gains / cp.noises
    keep = np.zeros(cp.n_beams, dtype=bool)
    keep[int(np.argmax(eh_score))] = True
    keep[cp.n_eh + int(np.argmax(id_score))] = True
    try:
        res = sca_solve(cp, config, keep=keep)
    except ScheduleInfeasible as exc:
        return _infeasible(cp, "gs_opa", "infeasible", best_rate=exc.best_rate)
    out = _from_solve(cp, "gs_opa", res)
    return out


def _equal_split(cp: CompactProblem, keep: np.ndarray) -> np.ndarray:
    y = np.zeros(cp.n_beams)
    y[keep] = cp.power_budget / int(keep.sum())
    return y


def optimal_sched_epa(
    cp: CompactProblem, rate_slack: float = 1e-9, cap: int = EXHAUSTIVE_CAP
) -> SchemeResult:
    """Best schedule when every scheduled beam gets the same power."""
    n = cp.n_beams
    if n > cap:
        raise CapExceeded(f"{n} beams would need {2 ** n - 1} schedules (cap {cap})")
    need_id = cp.rate_requirement > 0.0
    id_mask_bits = ((1 << cp.n_id) - 1) << cp.n_eh

    best_q = -np.inf
    best_y = None
    feasible_count = 0
    for mask in range(1, 1 << n):
        if need_id and not (mask & id_mask_bits):
            continue
        keep = np.array([(mask >> j) & 1 == 1 for j in range(n)])
        y = _equal_split(cp, keep)
        if cp.sum_rate(y) < cp.rate_requirement - rate_slack:
            continue
        feasible_count += 1
        q = cp.harvested(y)
        if q > best_q:
            best_q, best_y = q, y
    if best_y is None:
        return _infeasible(cp, "os_epa", "infeasible")
    return SchemeResult(
        scheme="os_epa",
        feasible=True,
        schedule=Schedule.from_flags(best_y > 0.0, cp.n_eh),
        powers=best_y,
        objective_watts=best_q,
        exact_rate=cp.sum_rate(best_y),
        budget_used=float(best_y.sum()),
        status="ok",
        detail={"feasible_count": feasible_count},
    )


def all_sched_epa(cp: CompactProblem, rate_slack: float = 1e-9) -> SchemeResult:
    """Everything on at equal power; reported even when the rate falls short."""
    keep = np.ones(cp.n_beams, dtype=bool)
    y = _equal_split(cp, keep)
    rate = cp.sum_rate(y)
    feasible = rate >= cp.rate_requirement - rate_slack
    return SchemeResult(
        scheme="as_epa",
        feasible=feasible,
        schedule=Schedule.from_flags(keep, cp.n_eh),
        powers=y,
        objective_watts=cp.harvested(y),
        exact_rate=rate,
        budget_used=float(y.sum()),
        status="ok" if feasible else "rate_unmet",
    )


def run_scheme(
    cp: CompactProblem, scheme: str, config: SCAConfig | None = None
) -> SchemeResult:
    """Dispatch by scheme name (see SCHEME_NAMES)."""
    if scheme == "proposed":
        return proposed(cp, config)
    if scheme == "exhaustive":
        return exhaustive_search(cp, config)
    if scheme == "gs_opa":
        return greedy_opa(cp, config)
    if scheme == "os_epa":
        return optimal_sched_epa(cp)
    if scheme == "as_epa":
        return all_sched_epa(cp)
    raise ValueError(f"unknown scheme {scheme!r}")
