"""One convexified power-allocation subproblem, solved to certificate grade.

The outer algorithm fixes slack anchors and asks for the optimal beam powers
of the linearized problem. This module owns the variable scaling (everything
the kernel sees is O(1)), the strictly feasible start, the call into the
barrier kernel, and an independent KKT certificate computed from the result.

Scaled variables, with P0 the power budget and g_m the m-th ID array gain:
    w_j = y_j / P0                  beam powers, sum(w) <= 1
    S_m = P0 / y_{id}               inverse received signal (x g_m P0)
    I_m = (a_m . w) + noise_m/(g_m P0)   interference-plus-noise (/ g_m P0)
so SINR_m = 1 / (S_m I_m) at tight slacks and the rate terms keep their form.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._kernels import BACKEND, barrier_solve
from .model import RestrictedProblem

LOG2E = float(np.log2(np.e))

_START_DELTAS = (1e-6, 1e-8, 1e-10, 1e-12, 1e-14)

_STATUS_NAMES = {
    0: "optimal",
    1: "max_iterations",
    2: "infeasible_start",
    3: "linesearch_stall",
}


class InfeasibleSubproblem(Exception):
    """No strictly feasible point exists for the linearized subproblem."""


class NumericalFailure(Exception):
    """The solver could not produce a usable iterate."""


@dataclass(frozen=True)
class SolverOptions:
    gap_tolerance: float = 1e-9
    active_tolerance: float = 1e-5
    inverse_power_cap: float = 1e15
    t_start_warm: float = 10.0
    t_start_cold: float = 1.0
    barrier_growth: float = 20.0


@dataclass
class SolverReport:
    """Solution of one subproblem, with its optimality certificate."""

    y: np.ndarray
    s_slack: np.ndarray
    i_slack: np.ndarray
    objective_watts: float
    gap: float
    primal_residual: float
    dual_residual: float
    complementarity: float
    n_outer: int
    n_newton: int
    status: str
    backend: str = BACKEND


@dataclass
class _ScaledData:
    """Kernel inputs for one subproblem, everything dimensionless."""

    q: np.ndarray
    q_scale: float
    id_cols: np.ndarray
    a_rows: np.ndarray
    noise_hat: np.ndarray
    c_s: np.ndarray
    c_i: np.ndarray
    rate_bound: float
    has_rate: bool
    s_max: np.ndarray
    i_max: np.ndarray
    gain_power: np.ndarray


def _scale(rp: RestrictedProblem, s_anchor, i_anchor, opts: SolverOptions) -> _ScaledData:
    p0 = rp.power_budget
    q_scale = float(np.max(rp.q)) * p0
    if q_scale <= 0.0:
        q_scale = 1.0
    q = rp.q * (p0 / q_scale)

    has_rate = rp.rate_requirement > 0.0 and rp.n_id > 0
    if not has_rate:
        empty = np.zeros(0)
        return _ScaledData(
            q=q,
            q_scale=q_scale,
            id_cols=np.zeros(0, dtype=np.intp),
            a_rows=np.zeros((0, rp.n_beams)),
            noise_hat=empty,
            c_s=empty,
            c_i=empty,
            rate_bound=0.0,
            has_rate=False,
            s_max=empty,
            i_max=empty,
            gain_power=empty,
        )

    gain_power = rp.id_gains * p0
    noise_hat = rp.noises / gain_power
    s_t = np.asarray(s_anchor, dtype=float) * gain_power
    i_t = np.asarray(i_anchor, dtype=float) / gain_power
    if np.any(s_t <= 0.0) or np.any(i_t <= 0.0):
        raise ValueError("slack anchors must be positive")

    # tangent plane of the convex per-receiver rate in (S, I) at the anchor
    c_s = LOG2E / (s_t + s_t * s_t * i_t)
    c_i = LOG2E / (i_t + i_t * i_t * s_t)
    anchor_rate = float(np.log2(1.0 + 1.0 / (s_t * i_t)).sum())
    rate_bound = rp.rate_requirement - anchor_rate - float(c_s @ s_t + c_i @ i_t)

    s_max = opts.inverse_power_cap * gain_power
    i_max = (1.0 + noise_hat) * (1.0 + 1e-6)
    return _ScaledData(
        q=q,
        q_scale=q_scale,
        id_cols=rp.id_cols,
        a_rows=rp.a_rows,
        noise_hat=noise_hat,
        c_s=c_s,
        c_i=c_i,
        rate_bound=rate_bound,
        has_rate=True,
        s_max=s_max,
        i_max=i_max,
        gain_power=gain_power,
    )


def _constraint_values(x, sd: _ScaledData) -> np.ndarray:
    nb = sd.q.shape[0]
    w = x[:nb]
    parts = [np.array([1.0 - w.sum()]), w]
    if sd.has_rate:
        m = len(sd.id_cols)
        s = x[nb : nb + m]
        i_ = x[nb + m :]
        parts.append(i_ - sd.a_rows @ w - sd.noise_hat)
        parts.append(s * w[sd.id_cols] - 1.0)
        parts.append(sd.s_max - s)
        parts.append(sd.i_max - i_)
        parts.append(np.array([-(sd.c_s @ s + sd.c_i @ i_) - sd.rate_bound]))
    return np.concatenate(parts)


def _interior_start(w_raw, sd: _ScaledData):
    """Strictly feasible start near w_raw, or None.

    Slacks start at their tight values inflated by delta; the ladder shrinks
    delta until the linearized rate keeps a positive margin (the tight point
    inherits the anchor's strict feasibility, inflation erodes it).
    """
    nb = sd.q.shape[0]
    w = np.maximum(np.asarray(w_raw, dtype=float), 1e-14)
    if sd.has_rate:
        # keep the S box satisfiable: S >= 1/w_id must fit under s_max
        w[sd.id_cols] = np.maximum(w[sd.id_cols], 2.0 / sd.s_max)
    total = w.sum()
    if total >= 1.0:
        # only rescale when actually needed: shrinking w raises the tight
        # 1/w_id slacks, which can eat a converged anchor's thin rate margin
        w *= (1.0 - 1e-9) / total

    if not sd.has_rate:
        x0 = w
        return x0 if _constraint_values(x0, sd).min() > 0.0 else None

    for delta in _START_DELTAS:
        s = (1.0 + delta) / w[sd.id_cols]
        i_ = (sd.a_rows @ w + sd.noise_hat) * (1.0 + delta)
        x0 = np.concatenate([w, s, i_])
        if _constraint_values(x0, sd).min() > 0.0:
            return x0
    return None


def _constraint_jacobian(x, sd: _ScaledData) -> np.ndarray:
    nb = sd.q.shape[0]
    m = len(sd.id_cols) if sd.has_rate else 0
    n = nb + 2 * m
    n_con = 1 + nb + 4 * m + (1 if sd.has_rate else 0)
    jac = np.zeros((n_con, n))
    jac[0, :nb] = -1.0
    jac[1 : 1 + nb, :nb] = np.eye(nb)
    if sd.has_rate:
        w = x[:nb]
        s = x[nb : nb + m]
        row = 1 + nb
        jac[row : row + m, :nb] = -sd.a_rows
        jac[row : row + m, nb + m : nb + 2 * m] = np.eye(m)
        row += m
        for k in range(m):
            jac[row + k, nb + k] = w[sd.id_cols[k]]
            jac[row + k, sd.id_cols[k]] = s[k]
        row += m
        jac[row : row + m, nb : nb + m] = -np.eye(m)
        row += m
        jac[row : row + m, nb + m : nb + 2 * m] = -np.eye(m)
        jac[-1, nb : nb + m] = -sd.c_s
        jac[-1, nb + m : nb + 2 * m] = -sd.c_i
    return jac


def _certify(x, sd: _ScaledData, opts: SolverOptions):
    """Independent KKT residuals for the scaled problem at x.

    Fits nonnegative multipliers on the active set by least squares and
    reports the residuals that fit actually achieves; nothing is assumed
    about the barrier's own multipliers.
    """
    g = _constraint_values(x, sd)
    nb = sd.q.shape[0]
    m = len(sd.id_cols) if sd.has_rate else 0
    grad_f = np.concatenate([-sd.q, np.zeros(2 * m)])

    primal = float(max(0.0, -g.min()))
    active = g <= opts.active_tolerance
    if not active.any():
        dual = float(np.max(np.abs(grad_f)))
        return primal, dual, 0.0

    jac = _constraint_jacobian(x, sd)
    jac_a = jac[active]
    lam_a, *_ = np.linalg.lstsq(jac_a.T, grad_f, rcond=None)
    if np.any(lam_a < 0.0):
        pos = lam_a > 0.0
        lam_a = np.zeros_like(lam_a)
        if pos.any():
            lam_a[pos], *_ = np.linalg.lstsq(jac_a[pos].T, grad_f, rcond=None)
            np.maximum(lam_a, 0.0, out=lam_a)
    dual = float(np.max(np.abs(grad_f - jac_a.T @ lam_a)))
    comp = float(np.max(np.abs(lam_a * g[active])))
    return primal, dual, comp


def solve_subproblem(
    rp: RestrictedProblem,
    s_anchor=None,
    i_anchor=None,
    warm_start=None,
    options: SolverOptions | None = None,
) -> SolverReport:
    """Solve one linearized subproblem on a restriction.

    Parameters
    ----------
    rp : RestrictedProblem
        Beams and rate terms of the scheduled subset.
    s_anchor, i_anchor : array_like, per kept ID receiver
        Slack anchors (inverse received power, interference-plus-noise in
        watts). Required whenever the rate requirement is positive.
    warm_start : array_like, optional
        Previous beam powers in watts; required with a rate constraint, where
        the anchors only certify feasibility near the point they came from.

    Returns
    -------
    SolverReport with powers in watts and scaled-problem residuals.
    """
    opts = options or SolverOptions()
    if rp.rate_requirement > 0.0 and rp.n_id == 0:
        raise InfeasibleSubproblem(
            "positive rate requirement with no information beams scheduled"
        )
    if rp.rate_requirement > 0.0 and (s_anchor is None or i_anchor is None):
        raise ValueError("slack anchors are required with a rate constraint")

    sd = _scale(rp, s_anchor, i_anchor, opts)
    nb = rp.n_beams
    p0 = rp.power_budget

    if warm_start is not None:
        w_raw = np.asarray(warm_start, dtype=float) / p0
    else:
        if sd.has_rate:
            raise ValueError("warm start is required with a rate constraint")
        w_raw = np.full(nb, 1.0 / (nb + 1))

    x0 = _interior_start(w_raw, sd)
    if x0 is None:
        raise InfeasibleSubproblem("no strictly feasible start for the subproblem")

    attempts = ((opts.t_start_warm, x0), (opts.t_start_cold, x0))
    x = lam = None
    gap = np.inf
    n_outer = n_newton = 0
    code = 3
    for t0, start in attempts:
        x_a, lam_a, gap_a, _, outer_a, newton_a, code_a = barrier_solve(
            sd.q,
            sd.id_cols,
            sd.a_rows,
            sd.noise_hat,
            sd.c_s,
            sd.c_i,
            sd.rate_bound,
            sd.has_rate,
            sd.s_max,
            sd.i_max,
            start,
            t0=t0,
            mu=opts.barrier_growth,
            gap_tol=opts.gap_tolerance,
        )
        n_outer += outer_a
        n_newton += newton_a
        if code_a == 0:
            x, lam, gap, code = x_a, lam_a, gap_a, code_a
            break
        if x is None or gap_a < gap:
            x, lam, gap, code = x_a, lam_a, gap_a, code_a

    if x is None or not np.all(np.isfinite(x)):
        raise NumericalFailure("barrier solver returned a non-finite iterate")

    primal, dual, comp = _certify(x, sd, opts)

    m = len(sd.id_cols) if sd.has_rate else 0
    y = x[:nb] * p0
    if sd.has_rate:
        s_slack = x[nb : nb + m] / sd.gain_power
        i_slack = x[nb + m :] * sd.gain_power
    else:
        s_slack = np.zeros(0)
        i_slack = np.zeros(0)

    return SolverReport(
        y=y,
        s_slack=s_slack,
        i_slack=i_slack,
        objective_watts=float(rp.q @ y),
        gap=float(gap),
        primal_residual=primal,
        dual_residual=dual,
        complementarity=comp,
        n_outer=n_outer,
        n_newton=n_newton,
        status=_STATUS_NAMES.get(code, "unknown"),
    )


def eliminate_slacks_check(
    rp: RestrictedProblem,
    s_anchor,
    i_anchor,
    warm_start,
    options: SolverOptions | None = None,
) -> float:
    """Independent objective for the same subproblem via slack elimination.

    At any optimum both slacks sit at their tight values (the rate tangent is
    decreasing in S and I), so substituting S = 1/w_id and I = a.w + noise
    leaves a smooth problem in w alone, which an off-the-shelf SQP handles.
    Returns the objective in watts; used to cross-check the barrier solver.
    """
    from scipy.optimize import minimize

    opts = options or SolverOptions()
    sd = _scale(rp, s_anchor, i_anchor, opts)
    nb = rp.n_beams
    p0 = rp.power_budget

    bounds = [(0.0, 1.0)] * nb
    constraints = [
        {"type": "ineq", "fun": lambda w: 1.0 - w.sum(), "jac": lambda w: -np.ones(nb)}
    ]
    if sd.has_rate:
        for j, smax in zip(sd.id_cols, sd.s_max):
            bounds[j] = (1.0 / smax, 1.0)

        def rate_room(w):
            s = 1.0 / w[sd.id_cols]
            i_ = sd.a_rows @ w + sd.noise_hat
            return -(sd.c_s @ s + sd.c_i @ i_) - sd.rate_bound

        def rate_room_jac(w):
            jac = -(sd.c_i @ sd.a_rows)
            jac = np.asarray(jac, dtype=float).copy()
            jac[sd.id_cols] += sd.c_s / w[sd.id_cols] ** 2
            return jac

        constraints.append({"type": "ineq", "fun": rate_room, "jac": rate_room_jac})

    w0 = _interior_start(np.asarray(warm_start, dtype=float) / p0, sd)
    if w0 is None:
        raise InfeasibleSubproblem("no strictly feasible start for the cross-check")
    w0 = w0[:nb]

    def is_feasible(w):
        if w.sum() > 1.0 + 1e-9 or np.any(w < -1e-12):
            return False
        return not sd.has_rate or rate_room(w) > -1e-7

    # SLSQP at very tight ftol may stop with "positive directional
    # derivative" (status 8) after it has already reached the optimum; a
    # looser retry usually terminates cleanly, and a stalled-but-feasible
    # iterate is accepted as is
    last = None
    for ftol in (1e-14, 1e-12, 1e-10):
        res = minimize(
            lambda w: -float(sd.q @ w),
            w0,
            jac=lambda w: -sd.q,
            bounds=bounds,
            constraints=constraints,
            method="SLSQP",
            options={"maxiter": 400, "ftol": ftol},
        )
        if res.success:
            return float(-res.fun * sd.q_scale)
        last = res
        if res.status == 8 and is_feasible(res.x):
            return float(-res.fun * sd.q_scale)
    raise NumericalFailure(f"cross-check SQP failed: {last.message}")
