"""Scan-level metrics: peak gain, 3 dB focal width, sidelobe level and
far-field beamwidth comparison.

All 1D scans run along the x-axis line through the focal point, with the
focal point itself swept along x.  Peak searches use a coarse grid no
wider than lambda/50 followed by golden-section refinement, so a ~0.36
lambda focal lobe cannot be skipped.

dB conventions (pinned per output, the source figures mix them):
  * gain_db      -- 10*log10(|E| / 1 V/m) by default ("field10"); a
                    20*log10 variant ("field20") is selectable.
  * focal width  -- half-power criterion |E| = peak/sqrt(2).
  * sll_db       -- always 20*log10(peak/sidelobe).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .field import FocalSpec, field_at, field_at_points
from .geometry import ElementSet, ValidityRegion, valid_mask

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0

DB_CONVENTIONS = ("field10", "field20")


def to_db(magnitude: float, convention: str = "field10") -> float:
    if convention not in DB_CONVENTIONS:
        raise ValueError(f"unknown db convention {convention!r}")
    factor = 10.0 if convention == "field10" else 20.0
    return factor * math.log10(magnitude)


@dataclass(frozen=True)
class GainScanRecord:
    x_f_m: float
    x_f_lambda: float
    peak_field_vpm: float
    gain_db: float
    peak_loc_m: float
    error: str | None = None


@dataclass(frozen=True)
class WidthRecord:
    x_f_m: float
    x_f_lambda: float
    width_x_lambda: float
    width_y_lambda: float
    resolvable: bool


@dataclass(frozen=True)
class SidelobeRecord:
    x_f_m: float
    x_f_lambda: float
    sll_db: float
    sidelobe_loc_m: float
    has_sidelobe: bool
    error: str | None = None


@dataclass(frozen=True)
class FarFieldPattern:
    phi0_rad: float
    phi_rad: np.ndarray
    magnitude: np.ndarray
    hpbw_deg: float


@dataclass(frozen=True)
class NfFfRow:
    r_c_lambda: float
    nf_width_lambda: float
    ff_bw_deg: float
    resolvable: bool


def _golden_max(f, a: float, b: float, tol: float) -> tuple[float, float]:
    """Golden-section maximizer on [a, b]; returns (x, f(x))."""
    x1 = b - _GOLDEN * (b - a)
    x2 = a + _GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + _GOLDEN * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - _GOLDEN * (b - a)
            f1 = f(x1)
    x = 0.5 * (a + b)
    return x, f(x)


def _bisect_crossing(f, lo: float, hi: float, target: float, tol: float) -> float:
    """Find t in [lo, hi] with f(t) = target, f(lo) >= target >= f(hi)."""
    for _ in range(200):
        if hi - lo <= tol and abs(hi - lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        if f(mid) >= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


class _LineScanner:
    """Shared machinery for 1D scans along an axis line through a focal
    point: a fixed coarse grid plus continuous re-evaluation for
    refinement."""

    def __init__(
        self,
        elements: ElementSet,
        region: ValidityRegion,
        axis: str,
        other_m: float,
        step_m: float,
    ):
        if axis not in ("x", "y"):
            raise ValueError(f"axis must be 'x' or 'y', got {axis!r}")
        self.elements = elements
        self.region = region
        self.axis = axis
        self.other_m = other_m
        self.step_m = step_m
        r = region.aperture_radius_m
        n = int(np.floor(2 * r / step_m)) + 1
        self.t = -r + step_m * np.arange(n)
        pts = self._points(self.t)
        self.mask = valid_mask(pts, region, elements)
        self.points = pts

    def _points(self, t: np.ndarray) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if self.axis == "x":
            return np.column_stack([t, np.full_like(t, self.other_m)])
        return np.column_stack([np.full_like(t, self.other_m), t])

    def magnitudes(self, focal: FocalSpec) -> np.ndarray:
        """|E| at the valid grid points; masked points are NaN."""
        out = np.full(len(self.t), np.nan)
        if self.mask.any():
            out[self.mask] = np.abs(
                field_at_points(self.points[self.mask], self.elements, focal)
            )
        return out

    def mag_at(self, t: float, focal: FocalSpec) -> float:
        p = self._points(np.asarray([t]))[0]
        return abs(field_at((p[0], p[1]), self.elements, focal))

    def runs(self) -> list[tuple[int, int]]:
        """Contiguous index ranges [i0, i1] of valid grid points."""
        idx = np.flatnonzero(self.mask)
        if len(idx) == 0:
            return []
        splits = np.flatnonzero(np.diff(idx) > 1)
        starts = np.r_[idx[0], idx[splits + 1]]
        ends = np.r_[idx[splits], idx[-1]]
        return list(zip(starts.tolist(), ends.tolist()))

    def run_of(self, i: int) -> tuple[int, int]:
        for lo, hi in self.runs():
            if lo <= i <= hi:
                return lo, hi
        raise ValueError(f"grid index {i} is not valid")

    def refine_peak(self, focal: FocalSpec, i: int, tol_m: float) -> tuple[float, float]:
        lo, hi = self.run_of(i)
        a = self.t[max(i - 1, lo)]
        b = self.t[min(i + 1, hi)]
        if b <= a:
            return float(self.t[i]), self.mag_at(float(self.t[i]), focal)
        return _golden_max(lambda t: self.mag_at(t, focal), a, b, tol_m)


def _default_search_step(elements: ElementSet, search_step_m: float | None) -> float:
    lam = elements.config.wavelength_m
    if search_step_m is None:
        return lam / 50.0
    if search_step_m > lam / 50.0 + 1e-15:
        raise ValueError(
            f"search_step_m must be <= lambda/50 = {lam / 50.0:g}, got {search_step_m:g}"
        )
    return search_step_m


def _pmap(fn, items, threads: int):
    if threads <= 1:
        return [fn(v) for v in items]
    with ThreadPoolExecutor(max_workers=threads) as ex:
        return list(ex.map(fn, items))


def peak_gain_scan(
    elements: ElementSet,
    focal_xs_m,
    search_step_m: float | None = None,
    region: ValidityRegion | None = None,
    db_convention: str = "field10",
    threads: int = 1,
) -> list[GainScanRecord]:
    """Peak |E| along the x-axis line, per focal position on the x-axis.

    The global maximum over all valid line points is recorded, so the
    focal-shifted true peak (and any stronger spurious focal region) is
    captured rather than the commanded focal point's own field value.
    Invalid focal positions yield a flagged record; the scan continues.
    """
    if region is None:
        region = ValidityRegion.for_config(elements.config)
    step = _default_search_step(elements, search_step_m)
    lam = elements.config.wavelength_m
    scanner = _LineScanner(elements, region, "x", 0.0, step)
    focal_xs_m = np.atleast_1d(np.asarray(focal_xs_m, dtype=float))

    def one(x_f: float) -> GainScanRecord:
        if not valid_mask(np.asarray([[x_f, 0.0]]), region, elements)[0]:
            return GainScanRecord(
                x_f_m=float(x_f),
                x_f_lambda=float(x_f / lam),
                peak_field_vpm=math.nan,
                gain_db=math.nan,
                peak_loc_m=math.nan,
                error="focal point in masked region",
            )
        focal = FocalSpec(float(x_f), 0.0)
        mags = scanner.magnitudes(focal)
        i = int(np.nanargmax(mags))
        loc, peak = scanner.refine_peak(focal, i, 1e-5 * lam)
        return GainScanRecord(
            x_f_m=float(x_f),
            x_f_lambda=float(x_f / lam),
            peak_field_vpm=peak,
            gain_db=to_db(peak, db_convention),
            peak_loc_m=loc,
        )

    return _pmap(one, focal_xs_m, threads)


@dataclass(frozen=True)
class AxisWidth:
    width_lambda: float
    crossing_lo_m: float
    crossing_hi_m: float
    peak_loc_m: float
    resolvable: bool


def focal_width(
    elements: ElementSet,
    focal: FocalSpec,
    axis: str,
    search_step_m: float | None = None,
    region: ValidityRegion | None = None,
) -> AxisWidth:
    """Half-power width of the dominant lobe along one axis line.

    The peak on the line is located, then the two |E| = peak/sqrt(2)
    crossings are bracketed outward and refined by bisection to 1e-4
    lambda.  The record is unresolvable when either crossing is missing
    inside the valid region or comes within the reactive margin of the
    array edge.
    """
    if region is None:
        region = ValidityRegion.for_config(elements.config)
    step = _default_search_step(elements, search_step_m)
    lam = elements.config.wavelength_m
    other = focal.y_m if axis == "x" else focal.x_m
    scanner = _LineScanner(elements, region, axis, other, step)
    mags = scanner.magnitudes(focal)
    if np.all(np.isnan(mags)):
        return AxisWidth(math.nan, math.nan, math.nan, math.nan, False)
    i = int(np.nanargmax(mags))
    lo_i, hi_i = scanner.run_of(i)
    t_pk, peak = scanner.refine_peak(focal, i, 1e-5 * lam)
    target = peak / math.sqrt(2.0)

    def march(direction: int) -> float:
        bound = scanner.t[hi_i] if direction > 0 else scanner.t[lo_i]
        t_prev, m_prev = t_pk, peak
        while True:
            t_next = t_prev + direction * step
            if (direction > 0 and t_next > bound) or (direction < 0 and t_next < bound):
                t_next = bound
            m_next = scanner.mag_at(t_next, focal)
            if m_next < target:
                f = lambda t: scanner.mag_at(t, focal)
                if direction > 0:
                    return _bisect_crossing(f, t_prev, t_next, target, 1e-4 * lam)
                return _bisect_crossing(lambda t: f(-t), -t_prev, -t_next, target, 1e-4 * lam) * -1.0
            if t_next == bound:
                return math.nan
            t_prev, m_prev = t_next, m_next

    c_hi = march(+1)
    c_lo = march(-1)
    if math.isnan(c_hi) or math.isnan(c_lo):
        return AxisWidth(math.nan, c_lo, c_hi, t_pk, False)
    width = (c_hi - c_lo) / lam
    rc = elements.config.radius_m
    ok = True
    for t in (c_lo, c_hi):
        p = (t, other) if axis == "x" else (other, t)
        if rc - math.hypot(*p) < region.margin_m - 1e-12:
            ok = False
    return AxisWidth(width, c_lo, c_hi, t_pk, ok)


def width_scan(
    elements: ElementSet,
    focal_xs_m,
    search_step_m: float | None = None,
    region: ValidityRegion | None = None,
    threads: int = 1,
) -> list[WidthRecord]:
    """Both-axis 3 dB widths for focal points swept along x."""
    lam = elements.config.wavelength_m
    focal_xs_m = np.atleast_1d(np.asarray(focal_xs_m, dtype=float))

    def one(x_f: float) -> WidthRecord:
        focal = FocalSpec(float(x_f), 0.0)
        wx = focal_width(elements, focal, "x", search_step_m, region)
        wy = focal_width(elements, focal, "y", search_step_m, region)
        return WidthRecord(
            x_f_m=float(x_f),
            x_f_lambda=float(x_f / lam),
            width_x_lambda=wx.width_lambda,
            width_y_lambda=wy.width_lambda,
            resolvable=wx.resolvable and wy.resolvable,
        )

    return _pmap(one, focal_xs_m, threads)


def _local_maxima(values: np.ndarray) -> list[int]:
    """Indices of local maxima of a 1D array, endpoints included."""
    out = []
    n = len(values)
    for i in range(n):
        left = values[i - 1] if i > 0 else -math.inf
        right = values[i + 1] if i < n - 1 else -math.inf
        if values[i] > left and values[i] >= right:
            out.append(i)
    return out


def sidelobe_scan(
    elements: ElementSet,
    focal_xs_m,
    search_step_m: float | None = None,
    region: ValidityRegion | None = None,
    threads: int = 1,
) -> list[SidelobeRecord]:
    """Main-lobe to strongest-sidelobe ratio along the x-axis line.

    The main lobe is the global line peak out to its first nulls (or to
    the valid-run boundary when no null exists on a side); the sidelobe
    is the largest remaining local maximum inside the valid region.
    Equal-height candidates resolve to the one nearest the main lobe.
    """
    if region is None:
        region = ValidityRegion.for_config(elements.config)
    step = _default_search_step(elements, search_step_m)
    lam = elements.config.wavelength_m
    scanner = _LineScanner(elements, region, "x", 0.0, step)
    focal_xs_m = np.atleast_1d(np.asarray(focal_xs_m, dtype=float))

    def one(x_f: float) -> SidelobeRecord:
        if not valid_mask(np.asarray([[x_f, 0.0]]), region, elements)[0]:
            return SidelobeRecord(float(x_f), float(x_f / lam), math.nan, math.nan, False,
                                  error="focal point in masked region")
        focal = FocalSpec(float(x_f), 0.0)
        mags = scanner.magnitudes(focal)
        i_pk = int(np.nanargmax(mags))
        run_lo, run_hi = scanner.run_of(i_pk)
        _, peak = scanner.refine_peak(focal, i_pk, 1e-5 * lam)

        # first nulls flanking the main peak, within its valid run
        lo = i_pk
        while lo > run_lo and mags[lo - 1] < mags[lo]:
            lo -= 1
        hi = i_pk
        while hi < run_hi and mags[hi + 1] < mags[hi]:
            hi += 1

        best_val, best_loc = -math.inf, math.nan
        for r_lo, r_hi in scanner.runs():
            seg = np.arange(r_lo, r_hi + 1)
            seg = seg[(seg < lo) | (seg > hi)]
            if len(seg) == 0:
                continue
            vals = mags[seg]
            for j in _local_maxima(vals):
                gi = int(seg[j])
                a = scanner.t[max(gi - 1, r_lo)]
                b = scanner.t[min(gi + 1, r_hi)]
                if b > a:
                    t_c, v_c = _golden_max(lambda t: scanner.mag_at(t, focal), a, b, 1e-5 * lam)
                else:
                    t_c, v_c = float(scanner.t[gi]), float(vals[j])
                closer = abs(t_c - scanner.t[i_pk]) < abs(best_loc - scanner.t[i_pk])
                if v_c > best_val + 1e-12 * peak or (abs(v_c - best_val) <= 1e-12 * peak and closer):
                    best_val, best_loc = v_c, t_c
        if not math.isfinite(best_val):
            return SidelobeRecord(float(x_f), float(x_f / lam), math.nan, math.nan, False)
        return SidelobeRecord(
            x_f_m=float(x_f),
            x_f_lambda=float(x_f / lam),
            sll_db=20.0 * math.log10(peak / best_val),
            sidelobe_loc_m=best_loc,
            has_sidelobe=True,
        )

    return _pmap(one, focal_xs_m, threads)


@dataclass(frozen=True)
class ApertureSidelobeRecord:
    x_f_m: float
    x_f_lambda: float
    sll_db: float
    sidelobe_xy_m: tuple[float, float]
    has_sidelobe: bool
    error: str | None = None


def aperture_sidelobe_scan(
    elements: ElementSet,
    focal_xs_m,
    grid_step_m: float | None = None,
    exclusion_radius_m: float | None = None,
    region: ValidityRegion | None = None,
    threads: int = 1,
) -> list[ApertureSidelobeRecord]:
    """Sidelobe search over the whole 2D valid region, not just the
    x-axis line.

    The main lobe is removed by excluding a disk around the field peak
    (default radius lambda/2, past the first null ring of the focal
    lobe); the sidelobe is the strongest remaining valid sample on a
    grid of the given step.  Rim sidelobes at azimuths away from the
    scan axis, invisible to the 1D scan, are picked up here.
    """
    if region is None:
        region = ValidityRegion.for_config(elements.config)
    lam = elements.config.wavelength_m
    step = _default_search_step(elements, grid_step_m)
    excl = 0.5 * lam if exclusion_radius_m is None else float(exclusion_radius_m)
    if excl <= 0:
        raise ValueError(f"exclusion radius must be > 0, got {excl}")

    rc = elements.config.radius_m
    g = np.arange(-rc, rc + step / 2, step)
    gx, gy = np.meshgrid(g, g)
    pts = np.column_stack([gx.ravel(), gy.ravel()])
    keep = valid_mask(pts, region, elements)
    pts = pts[keep]
    focal_xs_m = np.atleast_1d(np.asarray(focal_xs_m, dtype=float))

    def one(x_f: float) -> ApertureSidelobeRecord:
        if not valid_mask(np.asarray([[x_f, 0.0]]), region, elements)[0]:
            return ApertureSidelobeRecord(
                float(x_f), float(x_f / lam), math.nan, (math.nan, math.nan), False,
                error="focal point in masked region",
            )
        focal = FocalSpec(float(x_f), 0.0)
        mags = np.abs(field_at_points(pts, elements, focal))
        i_pk = int(np.argmax(mags))
        peak = float(mags[i_pk])
        outside = np.hypot(pts[:, 0] - pts[i_pk, 0], pts[:, 1] - pts[i_pk, 1]) > excl
        if not outside.any():
            return ApertureSidelobeRecord(
                float(x_f), float(x_f / lam), math.nan, (math.nan, math.nan), False
            )
        j = int(np.flatnonzero(outside)[np.argmax(mags[outside])])
        return ApertureSidelobeRecord(
            x_f_m=float(x_f),
            x_f_lambda=float(x_f / lam),
            sll_db=20.0 * math.log10(peak / float(mags[j])),
            sidelobe_xy_m=(float(pts[j, 0]), float(pts[j, 1])),
            has_sidelobe=True,
        )

    return _pmap(one, focal_xs_m, threads)


def far_field_pattern(
    elements: ElementSet,
    phi0_rad: float = 0.0,
    angular_step_rad: float | None = None,
) -> FarFieldPattern:
    """Far-field array factor vs azimuth, steered to phi0.

    AF(phi) = |sum_n exp(j*k*(u(phi) - u(phi0)) . r_n)| with u the unit
    direction -- the Fraunhofer limit of the near-field phasor sum.  The
    half-power beamwidth is refined by bisection around the main lobe.
    """
    max_step = math.radians(0.1)
    if angular_step_rad is None:
        angular_step_rad = math.radians(0.05)
    if angular_step_rad <= 0 or angular_step_rad > max_step + 1e-15:
        raise ValueError("angular step must be in (0, 0.1 deg]")
    k = 2.0 * np.pi / elements.config.wavelength_m
    xs, ys = elements.x, elements.y

    def af(phi):
        phi = np.asarray(phi, dtype=float)
        ph = k * (
            (np.cos(phi)[..., None] - math.cos(phi0_rad)) * xs
            + (np.sin(phi)[..., None] - math.sin(phi0_rad)) * ys
        )
        return np.abs(np.sum(np.exp(1j * ph), axis=-1))

    n = int(round(2.0 * np.pi / angular_step_rad))
    phis = 2.0 * np.pi * np.arange(n) / n
    pattern = af(phis)
    peak = float(af(phi0_rad))
    target = peak / math.sqrt(2.0)

    def crossing(direction: int) -> float:
        ph = phi0_rad
        while float(af(ph + direction * angular_step_rad)) >= target:
            ph += direction * angular_step_rad
            if abs(ph - phi0_rad) > np.pi:
                return math.nan  # pattern never drops to half power
        a, b = ph, ph + direction * angular_step_rad
        for _ in range(60):
            mid = 0.5 * (a + b)
            if float(af(mid)) >= target:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    hi, lo = crossing(+1), crossing(-1)
    hpbw = math.degrees(hi - lo) if math.isfinite(hi) and math.isfinite(lo) else math.nan
    return FarFieldPattern(phi0_rad=phi0_rad, phi_rad=phis, magnitude=pattern, hpbw_deg=hpbw)


def nf_ff_comparison(
    radii_lambda,
    n_elements: int,
    wavelength_m: float,
    angular_step_rad: float | None = None,
    search_step_m: float | None = None,
) -> list[NfFfRow]:
    """Near-field center focal width vs far-field beamwidth per radius."""
    from .geometry import ArrayConfig, ArrayKind, build_full_circle

    rows = []
    for r_lam in radii_lambda:
        if r_lam < 2.0:
            raise ValueError(f"radius must be >= 2 lambda, got {r_lam}")
        cfg = ArrayConfig(
            kind=ArrayKind.FULL_CIRCLE,
            n_elements=n_elements,
            radius_m=r_lam * wavelength_m,
            wavelength_m=wavelength_m,
        )
        elements = build_full_circle(cfg)
        w = focal_width(elements, FocalSpec(0.0, 0.0), "x", search_step_m)
        ff = far_field_pattern(elements, 0.0, angular_step_rad)
        rows.append(
            NfFfRow(
                r_c_lambda=float(r_lam),
                nf_width_lambda=w.width_lambda,
                ff_bw_deg=ff.hpbw_deg,
                resolvable=w.resolvable,
            )
        )
    return rows
