"""Mixed near/far-field SWIPT downlink model and its compact optimization form.

One beam per receiver: energy receivers get near-field focused beams, the
information receivers far-field steered beams. With binary scheduling
absorbed into effective beam powers y (y_j = s_j * P_j), the harvested sum
power and the ID rates are closed forms in y through the squared-correlation
matrix, which is what the optimizer works on.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .correlation import CorrelationMatrix, build_correlation_matrix
from .geometry import ArrayGeometry, Placement, array_gain, far_steering, near_steering

LOG2E = math.log2(math.e)


@dataclass(frozen=True)
class EnergyReceiver:
    """Near-field energy-harvesting receiver with a priority weight alpha."""

    placement: Placement
    weight: float = 1.0

    def __post_init__(self):
        if self.weight < 0.0:
            raise ValueError("EH weight must be nonnegative")


@dataclass(frozen=True)
class InfoReceiver:
    """Far-field information receiver with its noise power (watts)."""

    placement: Placement
    noise_power: float

    def __post_init__(self):
        if self.noise_power <= 0.0:
            raise ValueError("noise power must be positive")


@dataclass
class Scenario:
    """A full problem instance; treat as immutable once constructed."""

    geometry: ArrayGeometry
    energy_receivers: list[EnergyReceiver]
    info_receivers: list[InfoReceiver]
    power_budget: float
    harvest_efficiency: float = 0.5
    rate_requirement: float = 0.0

    def __post_init__(self):
        if not self.energy_receivers:
            raise ValueError("at least one energy receiver required")
        if not self.info_receivers:
            raise ValueError("at least one information receiver required")
        if self.power_budget <= 0.0:
            raise ValueError("power budget must be positive")
        if not 0.0 < self.harvest_efficiency <= 1.0:
            raise ValueError("harvest efficiency must be in (0, 1]")
        if self.rate_requirement < 0.0:
            raise ValueError("rate requirement must be nonnegative")
        z = self.geometry.rayleigh_distance
        for rx in self.energy_receivers:
            if rx.placement.distance >= z:
                raise ValueError(
                    f"EH receiver at r = {rx.placement.distance:.2f} m is not in the "
                    f"near field (Rayleigh distance {z:.2f} m)"
                )
        for rx in self.info_receivers:
            if rx.placement.distance < z:
                raise ValueError(
                    f"ID receiver at r = {rx.placement.distance:.2f} m is not in the "
                    f"far field (Rayleigh distance {z:.2f} m)"
                )

    @property
    def n_eh(self) -> int:
        return len(self.energy_receivers)

    @property
    def n_id(self) -> int:
        return len(self.info_receivers)

    @property
    def n_beams(self) -> int:
        return self.n_eh + self.n_id

    def eh_gains(self) -> np.ndarray:
        return np.array(
            [array_gain(self.geometry, r.placement.distance) for r in self.energy_receivers]
        )

    def id_gains(self) -> np.ndarray:
        return np.array(
            [array_gain(self.geometry, r.placement.distance) for r in self.info_receivers]
        )

    def noise_powers(self) -> np.ndarray:
        return np.array([r.noise_power for r in self.info_receivers])

    def weights(self) -> np.ndarray:
        return np.array([r.weight for r in self.energy_receivers])


@dataclass(frozen=True)
class Schedule:
    """Binary scheduling flags, EH receivers first then ID receivers."""

    eh: tuple
    info: tuple

    @classmethod
    def from_flags(cls, flags, n_eh: int) -> "Schedule":
        flags = [bool(f) for f in flags]
        return cls(eh=tuple(flags[:n_eh]), info=tuple(flags[n_eh:]))

    @property
    def flags(self) -> np.ndarray:
        return np.array(self.eh + self.info, dtype=bool)

    @property
    def n_scheduled(self) -> int:
        return int(sum(self.eh) + sum(self.info))


def eliminate_binaries(schedule: Schedule, powers) -> np.ndarray:
    """Fold scheduling into effective beam powers y_j = s_j * P_j."""
    powers = np.asarray(powers, dtype=float)
    if powers.shape != schedule.flags.shape:
        raise ValueError("powers length must match schedule length")
    if np.any(powers < 0.0):
        raise ValueError("powers must be nonnegative")
    return np.where(schedule.flags, powers, 0.0)


@dataclass(frozen=True)
class Recovery:
    """Threshold recovery of (schedule, powers) from effective powers."""

    schedule: Schedule
    powers: np.ndarray
    dropped_power: np.ndarray


def recover_schedule(y, threshold: float, n_eh: int) -> Recovery:
    """Invert the binary elimination: y_j >= threshold means scheduled.

    Sub-threshold residual power is zeroed and reported in dropped_power.
    """
    y = np.asarray(y, dtype=float)
    keep = y >= threshold
    return Recovery(
        schedule=Schedule.from_flags(keep, n_eh),
        powers=np.where(keep, y, 0.0),
        dropped_power=np.where(keep, 0.0, y),
    )


def _beam_vectors(scenario: Scenario) -> np.ndarray:
    geom = scenario.geometry
    vecs = [near_steering(geom, r.placement) for r in scenario.energy_receivers]
    vecs += [far_steering(geom, r.placement.angle) for r in scenario.info_receivers]
    return np.array(vecs)


def sinr_id(scenario: Scenario, schedule: Schedule, powers) -> np.ndarray:
    """Per-ID SINR computed directly from steering-vector inner products.

    Reference formula path used to validate the compact matrix form.
    """
    y = eliminate_binaries(schedule, powers)
    vecs = _beam_vectors(scenario)
    k = scenario.n_eh
    g_id = scenario.id_gains()
    noise = scenario.noise_powers()
    out = np.empty(scenario.n_id)
    for m in range(scenario.n_id):
        a_m = vecs[k + m]
        signal = y[k + m] * g_id[m]
        interference = noise[m]
        for j in range(scenario.n_beams):
            if j == k + m:
                continue
            interference += y[j] * g_id[m] * abs(np.vdot(a_m, vecs[j])) ** 2
        out[m] = signal / interference
    return out


def sum_rate(scenario: Scenario, y) -> float:
    """Sum of log2(1 + SINR_m) over ID receivers at effective powers y."""
    full = Schedule.from_flags([True] * scenario.n_beams, scenario.n_eh)
    return float(np.log2(1.0 + sinr_id(scenario, full, y)).sum())


def harvested_sum_power(scenario: Scenario, y) -> float:
    """Weighted harvested sum power zeta * sum_k alpha_k * sum_j y_j |h_k^H v_j|^2."""
    y = np.asarray(y, dtype=float)
    vecs = _beam_vectors(scenario)
    g_eh = scenario.eh_gains()
    alpha = scenario.weights()
    total = 0.0
    for k in range(scenario.n_eh):
        b_k = vecs[k]
        acc = 0.0
        for j in range(scenario.n_beams):
            acc += y[j] * abs(np.vdot(b_k, vecs[j])) ** 2
        total += alpha[k] * g_eh[k] * acc
    return scenario.harvest_efficiency * total


@dataclass
class CompactProblem:
    """Matrix form of the design problem over effective powers y.

    objective  maximize c_eh^T Lam_masked y
    subject to sum_m log2(1 + sinr_m(y)) >= rate_requirement
               1^T y <= power_budget,  y >= 0
    with sinr_m(y) = g_m y_{K+m} / (g_m (Lam_masked y)_{K+m} + noise_m).
    """

    c_eh: np.ndarray
    id_gains: np.ndarray
    noises: np.ndarray
    corr: CorrelationMatrix
    power_budget: float
    rate_requirement: float
    n_eh: int
    n_id: int

    @property
    def n_beams(self) -> int:
        return self.n_eh + self.n_id

    def objective_vector(self) -> np.ndarray:
        """Linear objective coefficients q = Lam_masked c_eh (symmetric matrix)."""
        return self.corr.masked @ self.c_eh

    def harvested(self, y) -> float:
        return float(self.objective_vector() @ np.asarray(y, dtype=float))

    def sinr(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        rows = self.corr.masked[self.n_eh :, :]
        interference = self.id_gains * (rows @ y) + self.noises
        signal = self.id_gains * y[self.n_eh :]
        return signal / interference

    def sum_rate(self, y) -> float:
        return float(np.log2(1.0 + self.sinr(y)).sum())

    def restrict(self, keep) -> "RestrictedProblem":
        """Sub-problem over the scheduled beams only (columns of y).

        All EH receivers keep harvesting from the scheduled beams, so the
        objective keeps the full c_eh weighting; only y coordinates and the
        rate terms of unscheduled ID receivers are removed.
        """
        keep = np.asarray(keep, dtype=bool)
        if keep.shape != (self.n_beams,):
            raise ValueError("keep mask length must match beam count")
        if not keep.any():
            raise ValueError("schedule must keep at least one beam")
        cols = np.flatnonzero(keep)
        q = self.objective_vector()[cols]
        kept_ids = [m for m in range(self.n_id) if keep[self.n_eh + m]]
        col_of = {j: i for i, j in enumerate(cols)}
        id_cols = np.array([col_of[self.n_eh + m] for m in kept_ids], dtype=np.intp)
        a_rows = self.corr.masked[np.ix_([self.n_eh + m for m in kept_ids], cols)]
        return RestrictedProblem(
            q=q,
            keep=cols,
            id_cols=id_cols,
            id_gains=self.id_gains[kept_ids],
            noises=self.noises[kept_ids],
            a_rows=a_rows,
            power_budget=self.power_budget,
            rate_requirement=self.rate_requirement,
            n_beams_full=self.n_beams,
        )

    def full_restriction(self) -> "RestrictedProblem":
        return self.restrict(np.ones(self.n_beams, dtype=bool))


@dataclass
class RestrictedProblem:
    """Solver-facing view of a CompactProblem on a subset of beams."""

    q: np.ndarray
    keep: np.ndarray
    id_cols: np.ndarray
    id_gains: np.ndarray
    noises: np.ndarray
    a_rows: np.ndarray
    power_budget: float
    rate_requirement: float
    n_beams_full: int

    @property
    def n_beams(self) -> int:
        return len(self.keep)

    @property
    def n_id(self) -> int:
        return len(self.id_cols)

    def embed(self, y_sub) -> np.ndarray:
        y = np.zeros(self.n_beams_full)
        y[self.keep] = np.asarray(y_sub, dtype=float)
        return y

    def objective(self, y_sub) -> float:
        return float(self.q @ np.asarray(y_sub, dtype=float))

    def sinr(self, y_sub) -> np.ndarray:
        y_sub = np.asarray(y_sub, dtype=float)
        interference = self.id_gains * (self.a_rows @ y_sub) + self.noises
        return self.id_gains * y_sub[self.id_cols] / interference

    def sum_rate(self, y_sub) -> float:
        if self.n_id == 0:
            return 0.0
        return float(np.log2(1.0 + self.sinr(y_sub)).sum())


def build_compact(scenario: Scenario) -> CompactProblem:
    """Assemble the compact matrix form from a scenario."""
    corr = build_correlation_matrix(
        scenario.geometry,
        [r.placement for r in scenario.energy_receivers],
        [r.placement for r in scenario.info_receivers],
    )
    c_eh = np.zeros(scenario.n_beams)
    c_eh[: scenario.n_eh] = (
        scenario.harvest_efficiency * scenario.weights() * scenario.eh_gains()
    )
    return CompactProblem(
        c_eh=c_eh,
        id_gains=scenario.id_gains(),
        noises=scenario.noise_powers(),
        corr=corr,
        power_budget=scenario.power_budget,
        rate_requirement=scenario.rate_requirement,
        n_eh=scenario.n_eh,
        n_id=scenario.n_id,
    )
