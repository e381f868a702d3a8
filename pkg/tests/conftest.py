"""Shared fixtures: the baseline config and synthetic compact problems."""

from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from mfswipt.config import ExperimentConfig, load_config
from mfswipt.correlation import CorrelationMatrix
from mfswipt.model import CompactProblem

REPO_ROOT = Path(__file__).resolve().parent.parent
BASELINE_CONFIG = REPO_ROOT / "configs" / "baseline.json"


@pytest.fixture(scope="session")
def baseline_config() -> ExperimentConfig:
    return load_config(BASELINE_CONFIG)


@pytest.fixture(scope="session")
def geometry(baseline_config):
    return baseline_config.geometry


def synthetic_compact(rng, n_eh=None, n_id=None, rate_frac=0.7, power_budget=1.0):
    """Random compact problem with physically plausible magnitudes.

    The rate requirement is `rate_frac` of the rate an equal split over the
    information beams achieves, so every instance is feasible by
    construction (rate_frac=0 turns the constraint off).
    """
    if n_eh is None:
        n_eh = int(rng.integers(1, 5))
    if n_id is None:
        n_id = int(rng.integers(1, 5))
    n = n_eh + n_id
    full = rng.uniform(0.0, 0.15, size=(n, n))
    full = (full + full.T) / 2.0
    np.fill_diagonal(full, 1.0)
    masked = full.copy()
    for j in range(n_eh, n):
        masked[j, j] = 0.0
    c_eh = np.concatenate(
        [10.0 ** rng.uniform(-6.5, -5.5, size=n_eh), np.zeros(n_id)]
    )
    cp = CompactProblem(
        c_eh=c_eh,
        id_gains=10.0 ** rng.uniform(-9.3, -8.7, size=n_id),
        noises=np.full(n_id, 1e-11),
        corr=CorrelationMatrix(full=full, masked=masked, n_eh=n_eh, n_id=n_id),
        power_budget=power_budget,
        rate_requirement=0.0,
        n_eh=n_eh,
        n_id=n_id,
    )
    if rate_frac <= 0.0:
        return cp
    y = np.zeros(n)
    y[n_eh:] = power_budget / n_id
    return replace(cp, rate_requirement=rate_frac * cp.sum_rate(y))


@pytest.fixture(scope="session")
def make_synthetic():
    return synthetic_compact
