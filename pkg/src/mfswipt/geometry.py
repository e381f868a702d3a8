"""XL uniform linear array geometry, field-region boundaries and steering vectors.

The base station is an N-element ULA on the y-axis with spacing d and
aperture D = N*d. Energy receivers sit in the radiating near field
(Fresnel region), information receivers beyond the Rayleigh distance.
Placements are given as (spatial angle, distance): theta = 2*d*cos(phi)/lambda
for physical angle-of-departure phi, so |theta| <= 1 at half-wavelength
spacing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SPEED_OF_LIGHT = 299792458.0


@dataclass
class ArrayGeometry:
    """ULA description: element count, spacing and carrier wavelength (meters)."""

    n_antennas: int
    element_spacing: float
    wavelength: float

    def __post_init__(self):
        if self.n_antennas < 2:
            raise ValueError(f"n_antennas must be >= 2, got {self.n_antennas}")
        if self.element_spacing <= 0.0:
            raise ValueError("element_spacing must be positive")
        if self.wavelength <= 0.0:
            raise ValueError("wavelength must be positive")

    @property
    def aperture(self) -> float:
        """Physical aperture D = N*d."""
        return self.n_antennas * self.element_spacing

    @property
    def rayleigh_distance(self) -> float:
        """Near/far boundary Z = 2 D^2 / lambda."""
        d_ap = self.aperture
        return 2.0 * d_ap * d_ap / self.wavelength

    @property
    def fresnel_region_min(self) -> float:
        """Inner Fresnel-region radius max(0.5*sqrt(D^3/lambda), 1.2*D)."""
        d_ap = self.aperture
        return max(0.5 * math.sqrt(d_ap**3 / self.wavelength), 1.2 * d_ap)

    def element_offsets(self) -> np.ndarray:
        """Signed element offsets delta_n = n - (N-1)/2 for n = 0..N-1."""
        n = self.n_antennas
        return np.arange(n, dtype=float) - (n - 1) / 2.0


@dataclass(frozen=True)
class Placement:
    """Receiver location as (spatial angle theta, BS distance r in meters)."""

    angle: float
    distance: float

    def __post_init__(self):
        if not abs(self.angle) <= 1.0:
            raise ValueError(f"spatial angle must satisfy |theta| <= 1, got {self.angle}")
        if not self.distance > 0.0:
            raise ValueError(f"distance must be positive, got {self.distance}")


def spatial_angle_from_aod(geom: ArrayGeometry, phi: float) -> float:
    """Convert a physical angle of departure phi (radians) to theta = 2 d cos(phi) / lambda."""
    theta = 2.0 * geom.element_spacing * math.cos(phi) / geom.wavelength
    if abs(theta) > 1.0:
        raise ValueError(
            f"AoD {phi} rad maps to |theta| = {abs(theta):.6f} > 1 "
            f"(spacing {geom.element_spacing} m exceeds lambda/2?)"
        )
    return theta


def element_distance_exact(geom: ArrayGeometry, place: Placement) -> np.ndarray:
    """Exact element-to-receiver distances sqrt(r^2 + delta^2 d^2 - 2 r theta delta d).

    Validation-only path; the steering vectors use the Fresnel approximation.
    """
    delta = geom.element_offsets()
    d = geom.element_spacing
    r, theta = place.distance, place.angle
    return np.sqrt(r * r + (delta * d) ** 2 - 2.0 * r * theta * delta * d)


def element_distance_fresnel(geom: ArrayGeometry, place: Placement) -> np.ndarray:
    """Second-order Taylor distances r - delta d theta + delta^2 d^2 (1-theta^2)/(2r)."""
    delta = geom.element_offsets()
    d = geom.element_spacing
    r, theta = place.distance, place.angle
    return r - delta * d * theta + (delta * d) ** 2 * (1.0 - theta * theta) / (2.0 * r)


def near_steering(geom: ArrayGeometry, place: Placement) -> np.ndarray:
    """Near-field steering vector b(theta, r), unit norm.

    Entry n is exp(-j 2 pi (r_n - r) / lambda) / sqrt(N) with r_n the
    Fresnel-approximated element distance.
    """
    rn = element_distance_fresnel(geom, place)
    phase = -2.0 * np.pi * (rn - place.distance) / geom.wavelength
    return np.exp(1j * phase) / np.sqrt(geom.n_antennas)


def far_steering(geom: ArrayGeometry, theta: float) -> np.ndarray:
    """Far-field steering vector a(theta) with entries exp(j pi n theta)/sqrt(N)."""
    n = np.arange(geom.n_antennas, dtype=float)
    return np.exp(1j * np.pi * n * theta) / np.sqrt(geom.n_antennas)


def channel_gain(wavelength: float, distance: float) -> float:
    """Free-space amplitude gain h = lambda / (4 pi r)."""
    if distance <= 0.0:
        raise ValueError("distance must be positive")
    return wavelength / (4.0 * math.pi * distance)


def array_gain(geom: ArrayGeometry, distance: float) -> float:
    """Effective beam gain g = N |h|^2 toward a receiver at the given distance."""
    h = channel_gain(geom.wavelength, distance)
    return geom.n_antennas * h * h
