import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from majorana_worldlines.frames import (CausalityError, FrameMap, causal_domain, circular_tau_shift,
                                        rindler_to_minkowski, tau2_limit, tau2_separation,
                                        tau2_two_accels)
from majorana_worldlines.worldline import ConstAccel, DomainError


def _literal(a, B, a2, tau):
    # oracle: the literal log-ratio in 400-digit arithmetic
    mpmath.mp.dps = 400
    c = mpmath.coth(a * mpmath.mpf(tau))
    return float(mpmath.log((B + mpmath.sqrt(B * B + c * c - 1)) / (c - 1)) / a2)


def test_rindler_origin_and_offset():
    t, x = rindler_to_minkowski(2.0, 0.0, 0.0)
    assert (t, x) == (0.0, 0.0)
    t, x = rindler_to_minkowski(2.0, 0.0, 1.0)
    assert t == 0.0 and x == pytest.approx(1.0)


def test_rindler_reduces_to_hyperbolic_motion():
    tau = np.linspace(0, 2, 9)
    t, x = rindler_to_minkowski(3.0, tau, 0.0)
    t2, x2 = ConstAccel(3.0).position(tau)
    np.testing.assert_allclose(t, t2, rtol=1e-13)
    np.testing.assert_allclose(x, x2, rtol=1e-12, atol=1e-15)


def test_zero_separation_is_identity():
    tau = np.linspace(0, 3, 7)
    np.testing.assert_array_equal(tau2_separation(5.0, 0.0, tau), tau)
    np.testing.assert_array_equal(tau2_two_accels(2.0, 2.0, tau), tau)


@pytest.mark.parametrize("a, L, tau", [(5.0, 1.0, 0.5), (5.0, 5.0, 0.01), (1.0, 0.3, 4.0),
                                       (5.0, 1.0, 30.0)])
def test_separation_against_literal_formula(a, L, tau):
    got = tau2_separation(a, L, np.array([tau]))[0]
    assert got == pytest.approx(_literal(a, a * L, a, tau), rel=1e-13)


@pytest.mark.parametrize("a, a2, tau", [(2.0, 5.0, 0.3), (2.0, 1.0, 1.0), (2.0, -1.0, 0.7),
                                        (2.0, 0.5, 10.0)])
def test_two_accels_against_literal_formula(a, a2, tau):
    got = tau2_two_accels(a, a2, np.array([tau]))[0]
    assert got > 0
    assert got == pytest.approx(_literal(a, a2 / a - 1, a2, tau), rel=1e-13)


@pytest.mark.parametrize("fmap", [FrameMap("separation", 5.0, L=1.0),
                                  FrameMap("two_accels", 2.0, a2=5.0),
                                  FrameMap("two_accels", 2.0, a2=-1.0),
                                  FrameMap("two_accels", 2.0, a2=0.0)])
def test_derivative_matches_finite_difference(fmap):
    tau = np.array([0.05, 0.3, 0.5, 1.5])
    h = 1e-6
    fd = (fmap(tau + h) - fmap(tau - h)) / (2 * h)
    np.testing.assert_allclose(fmap.derivative(tau), fd, rtol=1e-7, atol=1e-10)
    assert np.all(fmap.derivative(tau) > 0)


def test_origin_maps_to_origin():
    for fmap in (FrameMap("separation", 5.0, L=1.0), FrameMap("two_accels", 2.0, a2=5.0)):
        assert fmap(np.array([0.0]))[0] == 0.0
        assert 0 < fmap(np.array([1e-9]))[0] < 1e-7


def test_causal_bounds():
    assert causal_domain(2.0, 5.0) == math.inf
    assert causal_domain(2.0, -1.0) == pytest.approx(math.acosh(1.5), rel=1e-15)
    assert FrameMap("two_accels", 2.0, a2=2.0).causal_bound() == math.inf
    assert tau2_limit(2.0, 1.0) == pytest.approx(math.log(2.0))
    assert tau2_limit(2.0, -1.0) == pytest.approx(math.log(1.5))


def test_negative_partner_never_reaches_bound_from_the_observer():
    fm = FrameMap("two_accels", 2.0, a2=-1.0)
    rep = fm.report()
    assert rep["causal_bound_tau2"] == pytest.approx(math.acosh(1.5))
    assert rep["observer_bound"] == math.inf
    assert np.all(fm(np.linspace(0, 50, 101)) < math.acosh(1.5))


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 10.0), st.floats(-20.0, -0.01))
def test_partner_time_stays_inside_causal_domain(a, a2):
    # tau2 saturates at log(1 + x)/|a2| while the bound is arccosh(1 + x)/|a2|, x = |a2|/a
    assert tau2_limit(a, a2) < causal_domain(a, a2)
    assert FrameMap("two_accels", a, a2=a2).observer_bound() == math.inf


def test_causality_errors():
    with pytest.raises(DomainError):
        rindler_to_minkowski(1.0, 0.0, -2.0)
    assert issubclass(CausalityError, DomainError)


def test_circular_shift_report():
    rep = circular_tau_shift(0.9, 1.0)
    gam = 1 / math.sqrt(1 - 0.81)
    assert rep["gamma"] == pytest.approx(gam)
    assert rep["explicit_shift"] == pytest.approx((math.acos(0.19) - math.pi) / (gam * 0.9), rel=1e-14)
    assert rep["explicit_shift"] == pytest.approx(-0.85336, abs=1e-5)
    assert rep["implicit_root"] == pytest.approx(0.0, abs=1e-14)
    assert rep["explicit_residual"] == pytest.approx(-1.26149, abs=1e-5)
    assert not rep["ratio_form_has_root"]


def test_circular_shift_vanishes_for_slow_rotation():
    assert abs(circular_tau_shift(1e-4, 1.0)["implicit_root"]) < 1e-12


@settings(max_examples=40, deadline=None)
@given(st.floats(0.2, 10.0), st.floats(0.0, 8.0), st.floats(0.001, 5.0))
def test_separation_map_is_increasing(a, L, tau):
    t = np.array([tau, tau * 1.01 + 1e-6])
    v = tau2_separation(a, L, t)
    assert v[1] > v[0] > 0
