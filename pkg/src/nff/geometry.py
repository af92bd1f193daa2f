"""Circular-array geometry and observation-validity rules.

Two array layouts are supported: elements uniformly spaced on a full
circle, and elements on the half-circle arc covering angles in
[-pi/2, pi/2] (the +x side).  Observation points are only trusted
outside a reactive-near-field exclusion band around the populated arc.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class ArrayKind(str, Enum):
    FULL_CIRCLE = "full"
    HALF_CIRCLE = "half"


@dataclass(frozen=True)
class ArrayConfig:
    """Static description of one circular array.

    All lengths are in meters.  ``source_amplitude`` is the per-element
    field amplitude in V/m.
    """

    kind: ArrayKind
    n_elements: int
    radius_m: float
    wavelength_m: float
    source_amplitude: float = 1.0

    def __post_init__(self) -> None:
        if self.n_elements < 1:
            raise ValueError(f"n_elements must be >= 1, got {self.n_elements}")
        if self.radius_m <= 0:
            raise ValueError(f"radius_m must be > 0, got {self.radius_m}")
        if self.wavelength_m <= 0:
            raise ValueError(f"wavelength_m must be > 0, got {self.wavelength_m}")

    @property
    def chord_spacing_m(self) -> float:
        """Chord distance between adjacent elements of the full-circle layout."""
        return 2.0 * self.radius_m * math.sin(math.pi / self.n_elements)

    @property
    def chord_spacing_lambda(self) -> float:
        return self.chord_spacing_m / self.wavelength_m


def reactive_margin_m(wavelength_m: float, antenna_size_m: float | None = None) -> float:
    """Reactive/radiative near-field boundary distance for one element.

    Computed as (D/lambda)^(1/3) * D/2 for element size D (default: a
    half-wavelength dipole, D = lambda/2).  For that default the result
    is 0.198... lambda, conventionally rounded to 0.2 lambda.
    """
    d = wavelength_m / 2.0 if antenna_size_m is None else antenna_size_m
    return (d / wavelength_m) ** (1.0 / 3.0) * d / 2.0


@dataclass(frozen=True)
class ElementSet:
    """Ordered element positions produced from an :class:`ArrayConfig`.

    ``positions`` is an (N, 2) float array in meters; ``angles_rad``
    holds the placement angle of each element.
    """

    positions: np.ndarray
    angles_rad: np.ndarray
    config: ArrayConfig

    @property
    def x(self) -> np.ndarray:
        return self.positions[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.positions[:, 1]


def _from_angles(angles: np.ndarray, config: ArrayConfig) -> ElementSet:
    pos = np.column_stack(
        [config.radius_m * np.cos(angles), config.radius_m * np.sin(angles)]
    )
    pos.setflags(write=False)
    angles = angles.copy()
    angles.setflags(write=False)
    return ElementSet(positions=pos, angles_rad=angles, config=config)


def build_full_circle(config: ArrayConfig) -> ElementSet:
    """Place N elements uniformly on the full circle of radius r_c.

    Element n (n = 1..N) sits at angle 2*pi*(n+1)/N when N is even and
    2*pi*n/N when N is odd; the two conventions differ only by a rigid
    rotation of the whole array.
    """
    if config.kind is not ArrayKind.FULL_CIRCLE:
        raise ValueError(f"expected a full-circle config, got kind={config.kind!r}")
    n = np.arange(1, config.n_elements + 1, dtype=float)
    if config.n_elements % 2 == 0:
        angles = 2.0 * np.pi * (n + 1) / config.n_elements
    else:
        angles = 2.0 * np.pi * n / config.n_elements
    return _from_angles(angles, config)


def build_half_circle(config: ArrayConfig) -> ElementSet:
    """Place N elements on the arc [-pi/2, pi/2] at midpoint-rule angles.

    Element n (n = 1..N) sits at -pi/2 + (n - 1/2)*pi/N, so the N-term
    amplitude sum converges to the corresponding arc integral as a
    midpoint quadrature rule.
    """
    if config.kind is not ArrayKind.HALF_CIRCLE:
        raise ValueError(f"expected a half-circle config, got kind={config.kind!r}")
    n = np.arange(1, config.n_elements + 1, dtype=float)
    angles = -np.pi / 2.0 + (n - 0.5) * np.pi / config.n_elements
    return _from_angles(angles, config)


def build_elements(config: ArrayConfig) -> ElementSet:
    if config.kind is ArrayKind.FULL_CIRCLE:
        return build_full_circle(config)
    return build_half_circle(config)


@dataclass(frozen=True)
class ValidityRegion:
    """Observation-validity rule: inside the aperture, outside the
    reactive exclusion band around the populated arc."""

    margin_m: float
    aperture_radius_m: float

    def __post_init__(self) -> None:
        if self.margin_m <= 0:
            raise ValueError(f"margin_m must be > 0, got {self.margin_m}")

    @classmethod
    def for_config(cls, config: ArrayConfig, margin_m: float | None = None) -> "ValidityRegion":
        if margin_m is None:
            margin_m = 0.2 * config.wavelength_m
        return cls(margin_m=margin_m, aperture_radius_m=config.radius_m)


def arc_distance(px: np.ndarray, py: np.ndarray, elements: ElementSet) -> np.ndarray:
    """Distance from point(s) to the arc populated with elements.

    For the full circle this is | |p| - r_c |.  For the half circle the
    populated arc spans angles [-pi/2, pi/2]; points whose polar angle
    falls outside that span are measured against the arc endpoints
    (0, +-r_c), so the element-free edge near (-r_c, 0) stays far from
    the arc and remains a legitimate observation point.
    """
    rc = elements.config.radius_m
    r = np.hypot(px, py)
    if elements.config.kind is ArrayKind.FULL_CIRCLE:
        return np.abs(r - rc)
    phi = np.arctan2(py, px)
    radial = np.abs(r - rc)
    endpoint = np.minimum(np.hypot(px, py - rc), np.hypot(px, py + rc))
    return np.where(np.abs(phi) <= np.pi / 2.0, radial, endpoint)


def valid_mask(points: np.ndarray, region: ValidityRegion, elements: ElementSet) -> np.ndarray:
    """Vectorized validity test for an (M, 2) array of points."""
    points = np.asarray(points, dtype=float)
    px, py = points[..., 0], points[..., 1]
    r = np.hypot(px, py)
    inside = r <= region.aperture_radius_m + 1e-12
    clear = arc_distance(px, py, elements) >= region.margin_m - 1e-12
    return inside & clear


def is_valid_point(p: tuple[float, float], region: ValidityRegion, elements: ElementSet) -> bool:
    return bool(valid_mask(np.asarray([p], dtype=float), region, elements)[0])
