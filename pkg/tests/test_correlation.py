"""Beam correlations: exact inner products, the closed form, and the matrix."""

import numpy as np
import pytest

from mfswipt.correlation import (
    DegenerateCurvature,
    build_correlation_matrix,
    correlation_approx,
    correlation_exact,
    correlation_params,
    dirichlet_correlation,
)
from mfswipt.geometry import Placement


def random_near(rng, geometry):
    theta = rng.uniform(-0.9, 0.9)
    r = rng.uniform(geometry.fresnel_region_min, geometry.rayleigh_distance)
    return Placement(float(theta), float(r))


def test_exact_correlation_bounds(geometry):
    rng = np.random.default_rng(11)
    for _ in range(200):
        p, q = random_near(rng, geometry), random_near(rng, geometry)
        eta = correlation_exact(geometry, p, "near", q, "near")
        assert 0.0 <= eta <= 1.0 + 1e-12


def test_exact_correlation_symmetry(geometry):
    rng = np.random.default_rng(12)
    for _ in range(50):
        p, q = random_near(rng, geometry), random_near(rng, geometry)
        ab = correlation_exact(geometry, p, "near", q, "near")
        ba = correlation_exact(geometry, q, "near", p, "near")
        assert ab == pytest.approx(ba, abs=1e-12)


def test_self_correlation_is_one(geometry):
    p = Placement(0.2, 50.0)
    assert correlation_exact(geometry, p, "near", p, "near") == pytest.approx(
        1.0, abs=1e-12
    )


def test_closed_form_accuracy_grid(geometry):
    # small version of the acceptance sweep
    ref = Placement(0.0, geometry.fresnel_region_min)
    errs = []
    for theta in np.linspace(-0.9, 0.9, 20):
        for r in np.geomspace(
            geometry.fresnel_region_min, geometry.rayleigh_distance, 20
        ):
            probe = Placement(float(theta), float(r))
            exact = correlation_exact(geometry, ref, "near", probe, "near")
            approx = correlation_approx(geometry, ref, "near", probe, "near")
            errs.append(abs(exact - approx))
    errs = np.array(errs)
    assert errs.mean() < 0.05
    assert errs.max() < 0.15


def test_near_far_same_angle_reference(geometry):
    z = geometry.rayleigh_distance
    eta = correlation_exact(
        geometry, Placement(0.0, 0.015 * z), "near", Placement(0.0, 1.05 * z), "far"
    )
    assert eta == pytest.approx(0.17880238731050316, rel=1e-9)


def test_far_far_curvature_degenerates(geometry):
    p = Placement(0.1, 1.05 * geometry.rayleigh_distance)
    q = Placement(0.3, 1.20 * geometry.rayleigh_distance)
    with pytest.raises(DegenerateCurvature):
        correlation_params(geometry, p, "far", q, "far")


def test_dirichlet_matches_exact_far_pairs(geometry):
    rng = np.random.default_rng(13)
    z = geometry.rayleigh_distance
    for _ in range(50):
        t1, t2 = rng.uniform(-0.9, 0.9, size=2)
        p = Placement(float(t1), 1.1 * z)
        q = Placement(float(t2), 1.4 * z)
        exact = correlation_exact(geometry, p, "far", q, "far")
        closed = dirichlet_correlation(geometry.n_antennas, float(t2 - t1))
        assert closed == pytest.approx(exact, abs=1e-12)


def test_correlation_approx_refuses_degenerate_pairs(geometry):
    # the closed form needs curvature separation; far-far pairs go through
    # dirichlet_correlation instead
    z = geometry.rayleigh_distance
    p = Placement(0.1, 1.05 * z)
    q = Placement(0.3, 1.20 * z)
    with pytest.raises(DegenerateCurvature):
        correlation_approx(geometry, p, "far", q, "far")


def test_matrix_structure(baseline_config):
    scenario = baseline_config.build_scenario()
    corr = build_correlation_matrix(
        scenario.geometry,
        [r.placement for r in scenario.energy_receivers],
        [r.placement for r in scenario.info_receivers],
    )
    n, k = scenario.n_beams, scenario.n_eh
    assert corr.full.shape == (n, n)
    assert np.allclose(corr.full, corr.full.T, atol=1e-12)
    assert np.allclose(np.diag(corr.full), 1.0, atol=1e-12)
    assert np.all(corr.full >= 0.0) and np.all(corr.full <= 1.0 + 1e-12)
    # the masked variant zeroes only the ID self terms
    assert np.allclose(np.diag(corr.masked)[k:], 0.0, atol=0.0)
    off_diag = ~np.eye(n, dtype=bool)
    assert np.array_equal(corr.masked[off_diag], corr.full[off_diag])
    assert np.allclose(np.diag(corr.masked)[:k], 1.0, atol=1e-12)
