"""Beam correlations between near-field and far-field steering vectors.

The optimizer consumes exact correlations (inner products of steering
vectors). The closed-form Fresnel-integral approximation is provided for
analysis and correlation maps; it reproduces the exact magnitude well
whenever the curvature difference between the two placements is not
degenerate.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._kernels import fresnel_cs
from .geometry import ArrayGeometry, Placement, far_steering, near_steering

NEAR = "near"
FAR = "far"

# curvature differences below this (1/m) make the stationary-phase
# parameterization numerically meaningless; callers fall back to the
# Dirichlet closed form, which is exact for equal curvatures
DEGENERATE_CURVATURE_TOL = 1e-12


class DegenerateCurvature(ValueError):
    """Raised when the approximation's curvature difference is ~0."""


def fresnel_c(x):
    """Fresnel cosine integral C(x) = int_0^x cos(pi t^2 / 2) dt."""
    return fresnel_cs(x)[0]


def fresnel_s(x):
    """Fresnel sine integral S(x) = int_0^x sin(pi t^2 / 2) dt."""
    return fresnel_cs(x)[1]


def _validate_domain(geom: ArrayGeometry, place: Placement, kind: str) -> None:
    # the near-field boundary is the Rayleigh distance (the boundary point
    # itself is admitted, so sweeps may close the interval); the Fresnel
    # inner radius is advisory (reference scenarios place receivers slightly
    # inside it and the quadratic phase model is still accurate there)
    if kind == NEAR:
        hi = geom.rayleigh_distance
        if place.distance > hi:
            raise ValueError(
                f"near-field placement must satisfy r <= {hi:.4f} m, "
                f"got r = {place.distance:.4f}"
            )
    elif kind == FAR:
        if place.distance < geom.rayleigh_distance:
            raise ValueError(
                f"far-field placement must satisfy r >= {geom.rayleigh_distance:.4f} m, "
                f"got r = {place.distance:.4f}"
            )
    else:
        raise ValueError(f"field kind must be {NEAR!r} or {FAR!r}, got {kind!r}")


def _steering(geom: ArrayGeometry, place: Placement, kind: str) -> np.ndarray:
    if kind == NEAR:
        return near_steering(geom, place)
    return far_steering(geom, place.angle)


def correlation_exact(
    geom: ArrayGeometry,
    place_p: Placement,
    kind_p: str,
    place_q: Placement,
    kind_q: str,
) -> float:
    """|inner product| of the two placements' steering vectors, in [0, 1]."""
    _validate_domain(geom, place_p, kind_p)
    _validate_domain(geom, place_q, kind_q)
    vp = _steering(geom, place_p, kind_p)
    vq = _steering(geom, place_q, kind_q)
    return min(1.0, float(abs(np.vdot(vp, vq))))


def _curvature(place: Placement, kind: str) -> float:
    if kind == FAR:
        return 0.0
    return (1.0 - place.angle**2) / place.distance


@dataclass(frozen=True)
class CorrelationParams:
    """Stationary-phase parameters (beta1, beta2) for a placement pair."""

    beta1: float
    beta2: float
    delta_kappa: float


def correlation_params(
    geom: ArrayGeometry,
    place_p: Placement,
    kind_p: str,
    place_q: Placement,
    kind_q: str,
) -> CorrelationParams:
    """beta1 = (theta_q - theta_p)/sqrt(d |dk|), beta2 = (N/2) sqrt(d |dk|).

    dk is the curvature difference (1-theta_p^2)/r_p - (1-theta_q^2)/r_q with
    far-field placements contributing zero curvature. Raises
    DegenerateCurvature when |dk| < 1e-12 (the parameterization presumes
    half-wavelength spacing; its d/lambda factor is folded into dk).
    """
    dk = _curvature(place_p, kind_p) - _curvature(place_q, kind_q)
    if abs(dk) < DEGENERATE_CURVATURE_TOL:
        raise DegenerateCurvature(
            f"curvature difference {dk:.3e} 1/m below {DEGENERATE_CURVATURE_TOL:.0e}"
        )
    root = math.sqrt(geom.element_spacing * abs(dk))
    beta1 = (place_q.angle - place_p.angle) / root
    beta2 = 0.5 * geom.n_antennas * root
    return CorrelationParams(beta1=beta1, beta2=beta2, delta_kappa=dk)


def correlation_approx(
    geom: ArrayGeometry,
    place_p: Placement,
    kind_p: str,
    place_q: Placement,
    kind_q: str,
) -> float:
    """Closed-form correlation magnitude |(C^ + j S^)/(2 beta2)|.

    C^(b1, b2) = C(b1 + b2) - C(b1 - b2) and likewise S^ with the Fresnel
    sine integral. Raises DegenerateCurvature for near-equal curvatures;
    callers may fall back to dirichlet_correlation or correlation_exact.
    """
    par = correlation_params(geom, place_p, kind_p, place_q, kind_q)
    args = np.array([par.beta1 + par.beta2, par.beta1 - par.beta2])
    c, s = fresnel_cs(args)
    c_hat = c[0] - c[1]
    s_hat = s[0] - s[1]
    eta = abs(complex(c_hat, s_hat)) / (2.0 * par.beta2)
    return min(1.0, float(eta))


def dirichlet_correlation(n_antennas: int, delta_theta: float) -> float:
    """|sin(N pi dtheta / 2) / (N sin(pi dtheta / 2))|.

    Exact correlation for two placements of equal curvature (in particular
    any far-field pair) separated by delta_theta in spatial angle.
    """
    den = math.sin(0.5 * math.pi * delta_theta)
    if abs(den) < 1e-300:
        return 1.0
    num = math.sin(0.5 * math.pi * n_antennas * delta_theta)
    return min(1.0, abs(num / (n_antennas * den)))


@dataclass
class CorrelationMatrix:
    """Squared correlations between all beams: EH (near) first, then ID (far).

    ``full`` has unit diagonal; ``masked`` zeroes the ID self entries so
    that quadratic forms exclude each ID beam's own power (its diagonal
    would otherwise count the useful signal as interference).
    """

    full: np.ndarray
    masked: np.ndarray
    n_eh: int
    n_id: int


def build_correlation_matrix(
    geom: ArrayGeometry,
    eh_places: list[Placement],
    id_places: list[Placement],
) -> CorrelationMatrix:
    """Exact squared-correlation matrix over the K + M beams."""
    for p in eh_places:
        _validate_domain(geom, p, NEAR)
    for p in id_places:
        _validate_domain(geom, p, FAR)
    vecs = [near_steering(geom, p) for p in eh_places]
    vecs += [far_steering(geom, p.angle) for p in id_places]
    basis = np.array(vecs)
    gram = np.abs(basis.conj() @ basis.T) ** 2
    np.fill_diagonal(gram, 1.0)
    gram = np.minimum(gram, 1.0)
    # symmetrize exactly; the two triangles differ only by float noise
    gram = 0.5 * (gram + gram.T)
    masked = gram.copy()
    k = len(eh_places)
    for m in range(len(id_places)):
        masked[k + m, k + m] = 0.0
    return CorrelationMatrix(full=gram, masked=masked, n_eh=k, n_id=len(id_places))
