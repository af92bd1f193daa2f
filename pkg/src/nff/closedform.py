"""Analytic focal-region results and their quadrature oracles.

Three routes to the normalized field near the center of a large
full-circle array are provided: the direct Bessel form |J0(2*pi*D/lam)|,
the N-term Taylor-expanded phasor sum, and adaptive quadrature of the
Bessel integral representation.  The half-circle center/edge amplitude
limits (pi/r_c and ln((sqrt(2)+1)/(sqrt(2)-1))/r_c) and their ratio are
also computed, together with the arc integral that serves as the
large-N oracle for the discrete amplitude sum.

Formula notes, pinned here because the printed source is inconsistent:
the Taylor-route inner phase is 2*pi*D*cos(theta_n)/lam (an extra 1/r_c
in the printed version is dimensionally wrong and would not reduce to
the Bessel form), and the Bessel-form prefactor is dropped entirely by
normalizing every curve to its D = 0 value.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .geometry import ArrayKind, ElementSet


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""


def adaptive_simpson(
    f, a: float, b: float, tol: float = 1e-10, max_depth: int = 50, min_depth: int = 4
) -> float:
    """Adaptive Simpson quadrature with the classic (S2-S1)/15 error
    estimate.  ``tol`` is an absolute tolerance on the whole interval.

    ``min_depth`` forces a few subdivision levels before the error
    estimate is trusted; without it, periodic or symmetric integrands
    can fool the first coarse/fine comparison into agreeing exactly.
    """

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f1, f2, whole, tol, depth):
        xm = 0.5 * (x0 + x2)
        xl, xr = 0.5 * (x0 + xm), 0.5 * (xm + x2)
        fl, fr = f(xl), f(xr)
        left = simpson(x0, xm, f0, fl, f1)
        right = simpson(xm, x2, f1, fr, f2)
        err = left + right - whole
        if depth >= min_depth and abs(err) <= 15.0 * tol:
            return left + right + err / 15.0
        if depth >= max_depth:
            raise QuadratureError(
                f"max subdivision depth {max_depth} reached on [{x0}, {x2}]"
            )
        return recurse(x0, xm, f0, fl, f1, left, tol / 2.0, depth + 1) + recurse(
            xm, x2, f1, fr, f2, right, tol / 2.0, depth + 1
        )

    fa, fb = f(a), f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = simpson(a, b, fa, fm, fb)
    return recurse(a, b, fa, fm, fb, whole, tol, 0)


def j0(x: float) -> float:
    """Zeroth-order Bessel function of the first kind.

    Power series for |x| <= 8; Miller's normalized backward recurrence
    above.  Absolute error stays below 1e-10 for |x| <= 100 (verified
    against the integral representation in the test suite).
    """
    if not math.isfinite(x):
        raise ValueError(f"j0 requires finite input, got {x}")
    x = abs(x)
    if x == 0.0:
        return 1.0
    if x <= 8.0:
        s = 1.0
        term = 1.0
        m = 0
        while True:
            m += 1
            term *= -(x * x / 4.0) / (m * m)
            s += term
            if abs(term) < 1e-18 * abs(s) + 1e-300:
                return s
    # Miller backward recurrence, normalized by J0 + 2*sum(J_{2k}) = 1
    start = int(x) + 1 + int(20 + 2 * math.sqrt(x))
    if start % 2:
        start += 1
    j_up = 0.0  # J_{n+1}
    j_cur = 1e-300  # J_n (arbitrary seed)
    j0_un = 0.0
    even_sum = 0.0
    for n in range(start, 0, -1):
        j_dn = (2.0 * n / x) * j_cur - j_up
        j_up, j_cur = j_cur, j_dn
        if abs(j_cur) > 1e250:
            j_cur *= 1e-250
            j_up *= 1e-250
            even_sum *= 1e-250
        order = n - 1
        if order == 0:
            j0_un = j_cur
        elif order % 2 == 0:
            even_sum += j_cur
    return j0_un / (j0_un + 2.0 * even_sum)


def bessel_field(delta_m: float, r_c_m: float, wavelength_m: float) -> float:
    """Normalized field magnitude |J0(2*pi*delta/lambda)| of the
    large-N closed form; valid for offsets small against the radius."""
    if delta_m < 0:
        raise ValueError(f"delta must be >= 0, got {delta_m}")
    if delta_m > r_c_m / 5.0:
        warnings.warn(
            f"closed form assumes delta << r_c; delta={delta_m:g} m "
            f"exceeds r_c/5={r_c_m / 5.0:g} m",
            stacklevel=2,
        )
    return abs(j0(2.0 * math.pi * delta_m / wavelength_m))


def bessel_integral_oracle(z: float, tol: float = 1e-11) -> float:
    """J0(z) via quadrature of (1/pi) * int_0^pi cos(z*sin(theta)) dtheta;
    independent of the series/recurrence implementation."""
    return adaptive_simpson(lambda t: math.cos(z * math.sin(t)), 0.0, math.pi, tol) / math.pi


def taylor_field_sum(delta_m: float, elements: ElementSet, wavelength_m: float | None = None) -> float:
    """Normalized magnitude of the N-term Taylor-expanded phasor sum for
    a full-circle array with the focal point at the center."""
    if elements.config.kind is not ArrayKind.FULL_CIRCLE:
        raise ValueError("taylor_field_sum requires a full-circle array")
    lam = elements.config.wavelength_m if wavelength_m is None else wavelength_m
    rc = elements.config.radius_m
    cos_t = np.cos(elements.angles_rad)

    def raw(delta: float) -> complex:
        amp = 1.0 / np.sqrt(rc**2 + delta**2 - 2.0 * rc * delta * cos_t)
        phase = np.exp(
            -1j * (math.pi * delta**2 / (lam * rc) + 2.0 * math.pi * delta * cos_t / lam)
        )
        return complex(np.sum(amp * phase))

    # normalizing by the same code path makes the delta = 0 value exactly 1
    return float(abs(raw(delta_m)) / abs(raw(0.0)))


def amplitude_sum_at(p: tuple[float, float], elements: ElementSet) -> float:
    """Focal-point field amplitude per unit source amplitude,
    sum_n 1/|p - r_n| in 1/m."""
    d = np.hypot(p[0] - elements.x, p[1] - elements.y)
    if d.min() < 1e-12:
        raise ValueError(
            f"point coincides with element {int(np.argmin(d)) + 1} (1-based)"
        )
    return float(np.sum(1.0 / d))


def arc_integral(
    p: tuple[float, float],
    r_c_m: float,
    arc: tuple[float, float] = (0.0, 2.0 * math.pi),
    rel_tol: float = 1e-9,
) -> float:
    """Large-N continuum limit of the amplitude sum over one arc:

        int_arc dtheta / sqrt(x^2 + y^2 + r_c^2 - 2*r_c*(x*cos + y*sin))

    Adaptive quadrature to a relative tolerance of 1e-9 or better; the
    integrand's near-singularity as p approaches the arc is handled by
    subdivision, failing loudly if the tolerance cannot be met.
    """
    x, y = p
    a, b = arc
    if b <= a:
        raise ValueError(f"empty arc [{a}, {b}]")
    r2 = x * x + y * y

    def f(theta: float) -> float:
        d2 = r2 + r_c_m * r_c_m - 2.0 * r_c_m * (x * math.cos(theta) + y * math.sin(theta))
        if d2 <= 0.0:
            raise QuadratureError("observation point lies on the arc")
        return 1.0 / math.sqrt(d2)

    # scale the absolute tolerance from a crude first pass
    rough = (b - a) * f(0.5 * (a + b))
    return adaptive_simpson(f, a, b, tol=rel_tol * max(abs(rough), 1e-30) / 10.0)


class ClosedFormSource(str, Enum):
    BESSEL = "bessel"
    TAYLOR = "taylor"
    QUADRATURE = "quadrature"


@dataclass(frozen=True)
class ClosedFormResult:
    delta_lambda: float
    value: float
    source: ClosedFormSource


@dataclass(frozen=True)
class HalfCircleLimits:
    """Continuum amplitude limits of the half-circle array (per unit
    source amplitude) and their center/edge ratio."""

    center_field: float  # at the array center, 1/m
    edge_field: float  # at the element-free edge, 1/m
    ratio: float
    ratio_db: float  # 10*log10 convention, the one that yields ~2.5 dB

    @property
    def ratio_closed_form(self) -> float:
        return math.pi / math.log((math.sqrt(2.0) + 1.0) / (math.sqrt(2.0) - 1.0))


def center_edge_ratio(r_c_m: float) -> HalfCircleLimits:
    """Half-circle center vs element-free-edge field ratio,
    pi / ln((sqrt(2)+1)/(sqrt(2)-1)) ~ 1.7823 ~ 2.51 dB; independent of
    the radius, which cancels."""
    if r_c_m <= 0:
        raise ValueError(f"radius must be > 0, got {r_c_m}")
    ln_term = math.log((math.sqrt(2.0) + 1.0) / (math.sqrt(2.0) - 1.0))
    edge = ln_term / r_c_m
    center = math.pi / r_c_m
    ratio = math.pi / ln_term  # the radius cancels exactly
    return HalfCircleLimits(
        center_field=center,
        edge_field=edge,
        ratio=ratio,
        ratio_db=10.0 * math.log10(ratio),
    )


def phase_integral_magnitude(delta_m: float, wavelength_m: float, rel_tol: float = 1e-11) -> float:
    """|(1/(2*pi)) * int_0^{2*pi} exp(-j*2*pi*delta*cos(theta)/lambda) dtheta|.

    Quadrature oracle for the Bessel route: the integral equals
    J0(2*pi*delta/lambda) identically, evaluated here without touching
    the series/recurrence code path.
    """
    z = 2.0 * math.pi * delta_m / wavelength_m
    re = adaptive_simpson(lambda t: math.cos(z * math.cos(t)), 0.0, 2.0 * math.pi, rel_tol)
    im = adaptive_simpson(lambda t: -math.sin(z * math.cos(t)), 0.0, 2.0 * math.pi, rel_tol)
    return math.hypot(re, im) / (2.0 * math.pi)
