import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from nff import (
    amplitude_sum_at,
    arc_integral,
    bessel_field,
    build_full_circle,
    build_half_circle,
    center_edge_ratio,
    field_at,
    j0,
    taylor_field_sum,
    FocalSpec,
)
from nff.closedform import (
    QuadratureError,
    adaptive_simpson,
    bessel_integral_oracle,
    phase_integral_magnitude,
)

from conftest import LAM, full_config, half_config

HALF_ARC = (-math.pi / 2, math.pi / 2)
LN_EDGE = math.log((math.sqrt(2) + 1) / (math.sqrt(2) - 1))


def j0_quad(x: float) -> float:
    """Independent J0 oracle: (1/pi) * int_0^pi cos(x sin t) dt via scipy."""
    v, _ = quad(lambda t: math.cos(x * math.sin(t)), 0.0, math.pi, limit=200)
    return v / math.pi


class TestJ0:
    def test_at_zero(self):
        assert j0(0.0) == 1.0

    def test_against_integral_oracle_on_grid(self):
        for x in np.linspace(0.0, 20.0, 50):
            assert j0(float(x)) == pytest.approx(j0_quad(float(x)), abs=1e-9)

    @pytest.mark.parametrize("x", [25.0, 47.3, 73.1, 100.0])
    def test_large_argument(self, x):
        assert j0(x) == pytest.approx(j0_quad(x), abs=1e-10)

    def test_even_function(self):
        assert j0(-7.7) == j0(7.7)

    def test_first_zero_location(self):
        root = brentq(j0, 2.0, 3.0, xtol=1e-12)
        assert root == pytest.approx(2.404825557695773, abs=1e-9)

    def test_first_extremum_magnitude(self):
        assert j0(3.8317) == pytest.approx(-0.4028, abs=1e-4)
        assert j0(3.8317) == pytest.approx(j0_quad(3.8317), abs=1e-10)

    @pytest.mark.parametrize("x", [math.inf, math.nan])
    def test_rejects_non_finite(self, x):
        with pytest.raises(ValueError):
            j0(x)


class TestBesselField:
    def test_unity_at_zero_offset(self):
        assert bessel_field(0.0, 1.5, LAM) == 1.0

    def test_first_null_offset(self):
        # J0's first zero at 2*pi*delta/lambda = 2.4048 -> delta = 0.3827 lambda
        root = brentq(lambda d: j0(2 * math.pi * d / LAM), 0.3 * LAM, 0.45 * LAM)
        assert root / LAM == pytest.approx(2.404825557695773 / (2 * math.pi), abs=1e-9)
        assert bessel_field(root, 1.5, LAM) < 1e-9

    def test_half_power_width(self):
        hp = brentq(lambda d: bessel_field(d, 10.0, LAM) - 1 / math.sqrt(2), 0.05 * LAM, 0.3 * LAM)
        assert 2 * hp / LAM == pytest.approx(0.36, abs=0.02)

    def test_warns_outside_validity(self):
        with pytest.warns(UserWarning, match="delta << r_c"):
            bessel_field(0.5, 1.5, LAM)

    def test_rejects_negative_offset(self):
        with pytest.raises(ValueError):
            bessel_field(-0.1, 1.5, LAM)


class TestTaylorFieldSum:
    def test_unity_at_zero(self, full120):
        assert taylor_field_sum(0.0, full120) == 1.0

    def test_requires_full_circle(self, half120):
        with pytest.raises(ValueError):
            taylor_field_sum(0.0, half120)

    def test_tracks_direct_sum_and_bessel(self, full120):
        # agreement degrades with offset; bounds frozen from a dense
        # reference evaluation at lambda/100 resolution
        center = FocalSpec(0.0, 0.0)
        e_ref = abs(field_at((0.0, 0.0), full120, center))
        ds = np.arange(0.0, 2.0001, 0.01) * LAM
        eq1 = np.array([abs(field_at((float(d), 0.0), full120, center)) for d in ds]) / e_ref
        tay = np.array([taylor_field_sum(float(d), full120) for d in ds])
        bes = np.array([abs(j0(2 * math.pi * d / LAM)) for d in ds])
        one = ds <= LAM + 1e-12
        assert np.abs(tay - eq1)[one].max() < 0.025
        assert np.abs(tay - eq1).max() < 0.035
        assert np.abs(tay - bes)[one].max() < 0.04
        assert np.abs(tay - bes).max() < 0.06


class TestAmplitudeSum:
    def test_full_circle_center(self, full120):
        assert amplitude_sum_at((0.0, 0.0), full120) == pytest.approx(80.0, rel=1e-12)

    def test_half_circle_center_continuum_limit(self):
        elems = build_half_circle(half_config(n=10_000, rc=1.0))
        # continuum normalization: sum * (pi/N) -> pi/r_c
        val = amplitude_sum_at((0.0, 0.0), elems) * math.pi / 10_000
        assert val == pytest.approx(math.pi, rel=1e-3)

    def test_half_circle_edge_continuum_limit(self):
        elems = build_half_circle(half_config(n=10_000, rc=1.0))
        val = amplitude_sum_at((-1.0, 0.0), elems) * math.pi / 10_000
        assert val == pytest.approx(LN_EDGE, rel=1e-3)

    def test_rejects_coincident_point(self, full120):
        with pytest.raises(ValueError, match="element"):
            amplitude_sum_at((float(full120.x[0]), float(full120.y[0])), full120)


class TestArcIntegral:
    @pytest.mark.parametrize("rc", [0.5, 1.0, 2.0])
    def test_full_arc_at_center(self, rc):
        v = arc_integral((0.0, 0.0), rc)
        assert v == pytest.approx(2 * math.pi / rc, rel=1e-9)

    def test_half_arc_at_center(self):
        assert arc_integral((0.0, 0.0), 1.0, HALF_ARC) == pytest.approx(math.pi, rel=1e-9)

    def test_half_arc_at_element_free_edge(self):
        # antiderivative of sec: ln|sec + tan| evaluated at +-pi/4
        assert arc_integral((-1.0, 0.0), 1.0, HALF_ARC) == pytest.approx(LN_EDGE, rel=1e-9)

    def test_point_on_arc_fails_loudly(self):
        with pytest.raises(QuadratureError):
            arc_integral((1.0, 0.0), 1.0, HALF_ARC)

    def test_rejects_empty_arc(self):
        with pytest.raises(ValueError):
            arc_integral((0.0, 0.0), 1.0, (1.0, 1.0))

    @pytest.mark.parametrize(
        "p", [(0.0, 0.0), (-1.0, 0.0), (0.5, 0.2), (0.0, -0.6), (-0.3, 0.4)]
    )
    def test_is_continuum_limit_of_element_sum(self, p):
        elems = build_half_circle(half_config(n=10_000, rc=1.0))
        n_side = amplitude_sum_at(p, elems) / 10_000
        c_side = arc_integral(p, 1.0, HALF_ARC) / math.pi
        assert abs(n_side - c_side) / c_side < 1e-3


class TestCenterEdgeRatio:
    def test_scale_invariance(self):
        r1 = center_edge_ratio(0.7)
        r2 = center_edge_ratio(3.0)
        assert r1.ratio == r2.ratio

    def test_closed_form_value(self):
        limits = center_edge_ratio(1.0)
        assert limits.ratio == pytest.approx(math.pi / LN_EDGE, rel=1e-14)
        assert limits.ratio == pytest.approx(1.7822, abs=1e-4)
        assert limits.ratio_db == pytest.approx(2.51, abs=0.01)

    def test_consistent_with_arc_integral(self):
        limits = center_edge_ratio(1.0)
        quad_ratio = arc_integral((0.0, 0.0), 1.0, HALF_ARC) / arc_integral(
            (-1.0, 0.0), 1.0, HALF_ARC
        )
        assert limits.ratio == pytest.approx(quad_ratio, rel=1e-9)

    def test_rejects_bad_radius(self):
        with pytest.raises(ValueError):
            center_edge_ratio(0.0)


class TestQuadrature:
    def test_known_integrals(self):
        assert adaptive_simpson(math.sin, 0.0, math.pi, 1e-12) == pytest.approx(2.0, rel=1e-10)
        assert adaptive_simpson(lambda x: x**2, 0.0, 3.0, 1e-12) == pytest.approx(9.0, rel=1e-12)

    def test_depth_limit_raises(self):
        with pytest.raises(QuadratureError):
            adaptive_simpson(lambda x: 1.0 / math.sqrt(abs(x) + 1e-300), -1.0, 1.0, 1e-14, max_depth=5)

    def test_bessel_identity_via_package_oracle(self):
        for x in np.linspace(0.0, 20.0, 21):
            assert bessel_integral_oracle(float(x)) == pytest.approx(j0_quad(float(x)), abs=1e-9)

    def test_phase_integral_equals_j0(self):
        for d_lam in (0.0, 0.1, 0.38, 1.0, 2.7):
            expected = abs(j0_quad(2 * math.pi * d_lam))
            assert phase_integral_magnitude(d_lam * LAM, LAM) == pytest.approx(expected, abs=1e-9)
