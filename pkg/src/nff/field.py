"""Phase-conjugation near-field evaluation at points, lines and rasters.

The z-polarized field at observation point p for focal point f is

    E(p) = E0 * sum_n exp(-j*2*pi*(|p - r_n| - |f - r_n|)/lambda) / |p - r_n|

in V/m.  Every term has zero phase at p = f, so the focal point is the
constructive-interference optimum.  Points inside the reactive exclusion
band are masked: stored as exactly zero with valid=False.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import ElementSet, ValidityRegion, valid_mask

_EVAL_CHUNK = 16384


class CoincidentElementError(ValueError):
    """Observation point coincides with an array element."""

    def __init__(self, element_index: int):
        self.element_index = element_index
        super().__init__(
            f"observation point coincides with element {element_index} "
            "(1-based); the field model diverges there"
        )


@dataclass(frozen=True)
class FocalSpec:
    """In-plane focal point, meters."""

    x_m: float
    y_m: float

    @property
    def point(self) -> tuple[float, float]:
        return (self.x_m, self.y_m)


@dataclass(frozen=True)
class FieldSample:
    point: tuple[float, float]
    value: complex
    valid: bool


@dataclass(frozen=True)
class FieldMap:
    """Row-major raster of field samples on a rectangular lattice."""

    x0_m: float
    y0_m: float
    step_m: float
    nx: int
    ny: int
    values: np.ndarray  # (ny, nx) complex, masked cells exactly zero
    valid: np.ndarray  # (ny, nx) bool
    focal: FocalSpec

    @property
    def x_coords(self) -> np.ndarray:
        return self.x0_m + self.step_m * np.arange(self.nx)

    @property
    def y_coords(self) -> np.ndarray:
        return self.y0_m + self.step_m * np.arange(self.ny)

    def peak(self) -> tuple[float, tuple[float, float]] | None:
        """(magnitude, (x, y)) of the strongest valid sample, or None
        when every cell is masked."""
        if not self.valid.any():
            return None
        mag = np.abs(self.values)
        mag[~self.valid] = -1.0
        iy, ix = np.unravel_index(np.argmax(mag), mag.shape)
        return float(mag[iy, ix]), (float(self.x_coords[ix]), float(self.y_coords[iy]))


def _resolve(elements: ElementSet, wavelength_m: float | None, e0: float | None):
    cfg = elements.config
    lam = cfg.wavelength_m if wavelength_m is None else wavelength_m
    amp = cfg.source_amplitude if e0 is None else e0
    return lam, amp


def field_at(
    p: tuple[float, float],
    elements: ElementSet,
    focal: FocalSpec,
    wavelength_m: float | None = None,
    e0: float | None = None,
) -> complex:
    """Exact phasor sum at one observation point (no validity masking)."""
    lam, amp = _resolve(elements, wavelength_m, e0)
    d = np.hypot(p[0] - elements.x, p[1] - elements.y)
    if d.min() < 1e-12:
        raise CoincidentElementError(int(np.argmin(d)) + 1)
    df = np.hypot(focal.x_m - elements.x, focal.y_m - elements.y)
    return complex(amp * np.sum(np.exp(-2j * np.pi * (d - df) / lam) / d))


def field_at_points(
    points: np.ndarray,
    elements: ElementSet,
    focal: FocalSpec,
    wavelength_m: float | None = None,
    e0: float | None = None,
) -> np.ndarray:
    """Vectorized phasor sum for an (M, 2) point array, chunked to bound
    memory.  No masking; callers mask before or after."""
    lam, amp = _resolve(elements, wavelength_m, e0)
    points = np.asarray(points, dtype=float)
    df = np.hypot(focal.x_m - elements.x, focal.y_m - elements.y)
    out = np.empty(len(points), dtype=complex)
    for i in range(0, len(points), _EVAL_CHUNK):
        chunk = points[i : i + _EVAL_CHUNK]
        d = np.hypot(chunk[:, 0, None] - elements.x, chunk[:, 1, None] - elements.y)
        if d.size and d.min() < 1e-12:
            flat = int(np.argmin(d))
            raise CoincidentElementError(flat % elements.config.n_elements + 1)
        out[i : i + _EVAL_CHUNK] = amp * np.sum(np.exp(-2j * np.pi * (d - df) / lam) / d, axis=1)
    return out


def line_coords(start_m: float, stop_m: float, step_m: float) -> np.ndarray:
    if step_m <= 0:
        raise ValueError(f"step must be > 0, got {step_m}")
    if stop_m <= start_m:
        raise ValueError(f"empty range [{start_m}, {stop_m}]")
    n = int(np.floor((stop_m - start_m) / step_m + 1e-9)) + 1
    return start_m + step_m * np.arange(n)


def field_line(
    axis: str,
    start_m: float,
    stop_m: float,
    step_m: float,
    elements: ElementSet,
    focal: FocalSpec,
    region: ValidityRegion | None = None,
    wavelength_m: float | None = None,
    e0: float | None = None,
) -> list[FieldSample]:
    """Sample the field along the x- or y-axis line through the focal
    point.  Masked points are returned as zero with valid=False."""
    if axis not in ("x", "y"):
        raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
    if region is None:
        region = ValidityRegion.for_config(elements.config)
    t = line_coords(start_m, stop_m, step_m)
    if axis == "x":
        pts = np.column_stack([t, np.full_like(t, focal.y_m)])
    else:
        pts = np.column_stack([np.full_like(t, focal.x_m), t])
    mask = valid_mask(pts, region, elements)
    values = np.zeros(len(t), dtype=complex)
    if mask.any():
        values[mask] = field_at_points(pts[mask], elements, focal, wavelength_m, e0)
    return [
        FieldSample(point=(float(pts[i, 0]), float(pts[i, 1])), value=complex(values[i]), valid=bool(mask[i]))
        for i in range(len(t))
    ]


def field_map(
    x0_m: float,
    y0_m: float,
    step_m: float,
    nx: int,
    ny: int,
    elements: ElementSet,
    focal: FocalSpec,
    region: ValidityRegion | None = None,
    wavelength_m: float | None = None,
    e0: float | None = None,
) -> FieldMap:
    """Evaluate the field over a rectangular raster with masking."""
    if nx < 1 or ny < 1:
        raise ValueError(f"degenerate grid {nx} x {ny}")
    if step_m <= 0:
        raise ValueError(f"step must be > 0, got {step_m}")
    if region is None:
        region = ValidityRegion.for_config(elements.config)
    xs = x0_m + step_m * np.arange(nx)
    ys = y0_m + step_m * np.arange(ny)
    gx, gy = np.meshgrid(xs, ys)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    mask = valid_mask(pts, region, elements)
    values = np.zeros(len(pts), dtype=complex)
    if mask.any():
        values[mask] = field_at_points(pts[mask], elements, focal, wavelength_m, e0)
    return FieldMap(
        x0_m=x0_m,
        y0_m=y0_m,
        step_m=step_m,
        nx=nx,
        ny=ny,
        values=values.reshape(ny, nx),
        valid=mask.reshape(ny, nx),
        focal=focal,
    )
