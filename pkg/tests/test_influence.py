import math

import numpy as np
import pytest

from majorana_worldlines.influence import (CosineSwitch, Gaussian, Unity, influence_bruteforce,
                                           influence_const_accel_closed, influence_e, influence_m,
                                           influence_static_exact, influence_thermal)
from majorana_worldlines.quadrature import TimeGrid
from majorana_worldlines.spectra import Spectrum
from majorana_worldlines.worldline import Circular, ConstAccel, ConstVelocity, Constant, Rectangular, Static


def _richardson_oracle(wl, sw, sp, tau_max, n):
    # oracle: per-pair frequency integrals with the trapezoid double-time sum, h and h/2 combined
    coarse = influence_bruteforce(wl, sw, sp, np.linspace(0, tau_max, n + 1), rtol=1e-10)
    fine = influence_bruteforce(wl, sw, sp, np.linspace(0, tau_max, 2 * n + 1), rtol=1e-10)
    return (4 * fine[::2] - coarse) / 3


@pytest.mark.parametrize("wl, tol", [(ConstAccel(2.0), 2e-5), (Circular(1.0, Constant(0.9)), 1e-3)])
def test_factorized_matches_double_time_oracle(wl, tol):
    sp = Spectrum("superohmic", lambda_uv=3.0)
    got = influence_m(wl, Gaussian(0.5), sp, TimeGrid.uniform(1.0, 0.01), rtol=1e-9,
                      method="factorized")
    ref = _richardson_oracle(wl, Gaussian(0.5), sp, 1.0, 20)
    np.testing.assert_allclose(got.values[::5][1:], ref[1:], rtol=tol)


def test_angular_velocity_jump_keeps_high_order():
    # the speed jumps at 0.3, 0.5 and 0.7; one-sided values keep the step error well above first order
    wl, sp = Circular(1.0, Rectangular(0.95, 0.3, 0.5)), Spectrum("superohmic")
    vals = [influence_m(wl, Unity(), sp, TimeGrid.uniform(1.0, h), rtol=1e-10, record_every=r).values
            for h, r in ((0.01, 1), (0.005, 2), (0.0025, 4))]
    e1 = np.max(np.abs(vals[0] - vals[1]))
    e2 = np.max(np.abs(vals[1] - vals[2]))
    assert e1 / e2 > 8


def test_stationary_circular_matches_factorized():
    wl, sp = Circular(1.0, Constant(0.9)), Spectrum("superohmic")
    g = TimeGrid.uniform(1.0, 0.005)
    a = influence_m(wl, Unity(), sp, g, method="stationary", rtol=1e-9)
    b = influence_m(wl, Unity(), sp, g, method="factorized", rtol=1e-9)
    np.testing.assert_allclose(a.values[1:], b.values[1:], rtol=1e-5)


@pytest.mark.parametrize("kind", ["uniform", "superohmic", "subohmic"])
def test_static_matches_exact(kind):
    sp = Spectrum(kind)
    g = TimeGrid.uniform(2.0, 0.01)
    got = influence_m(Static(), Unity(), sp, g, rtol=1e-9)
    ref = influence_static_exact(sp, g.nodes)
    np.testing.assert_allclose(got.values, ref, rtol=1e-6)


def test_closed_form_matches_quadrature():
    sp = Spectrum("superohmic")
    g = TimeGrid.uniform(1.0, 0.005)
    got = influence_m(ConstAccel(5.0), Unity(), sp, g, rtol=1e-9)
    ref = influence_const_accel_closed(5.0, sp, g.nodes[::40])
    np.testing.assert_allclose(got.values[::40], ref, rtol=1e-6)


def test_thermal_dominates_vacuum():
    sp = Spectrum("superohmic")
    t = np.linspace(0, 3, 7)
    hot, cold = influence_thermal(sp, 2.0, t), influence_thermal(sp, 0.0, t)
    assert np.all(hot[1:] < cold[1:])
    assert hot[0] == cold[0] == 0.0


def test_environment_frame_of_inertial_mode_is_time_dilated():
    v = 0.6
    gam = 1 / math.sqrt(1 - v * v)
    sp = Spectrum("superohmic")
    e = influence_e(ConstVelocity(v), Unity(), sp, TimeGrid.uniform(2.0, 0.01), rtol=1e-9)
    m = influence_m(ConstVelocity(v), Unity(), sp, TimeGrid.uniform(2.0 / gam, 0.01 / gam), rtol=1e-9)
    np.testing.assert_allclose(e.values[1:], m.values[1:], rtol=1e-6)


def test_boost_invariance_of_uniform_spectrum():
    # the hard UV truncation breaks invariance at early times; push it out of the way
    sp = Spectrum("uniform", lambda_max=3000.0)
    g = TimeGrid.uniform(1.0, 0.01)
    ref = influence_m(Static(), Unity(), sp, g, rtol=1e-9).values
    for v in (0.4, 0.8):
        got = influence_m(ConstVelocity(v), Unity(), sp, g, rtol=1e-9).values
        np.testing.assert_allclose(got[1:], ref[1:], rtol=1e-3)


@pytest.mark.parametrize("wl", [Static(), ConstAccel(3.0), Circular(1.0, Constant(0.7))])
@pytest.mark.parametrize("sw", [Unity(), Gaussian(0.3), CosineSwitch(5.0)])
def test_non_positive_and_zero_at_origin(wl, sw):
    s = influence_m(wl, sw, Spectrum("superohmic"), TimeGrid.uniform(1.0, 0.01), rtol=1e-6)
    assert s.values[0] == 0.0
    assert np.all(s.values <= 0)
    assert s.converged


def test_zero_coupling_is_trivial():
    s = influence_m(ConstAccel(1.0), Unity(), Spectrum("ohmic", q=0.0), TimeGrid.uniform(1.0, 0.1))
    assert np.all(s.values == 0) and s.meta["method"] == "trivial"


def test_coupling_scales_quadratically():
    g = TimeGrid.uniform(0.5, 0.01)
    a = influence_m(ConstAccel(2.0), Unity(), Spectrum("superohmic", q=1.0), g, rtol=1e-9)
    b = influence_m(ConstAccel(2.0), Unity(), Spectrum("superohmic", q=0.5), g, rtol=1e-9)
    np.testing.assert_allclose(b.values[1:], 0.25 * a.values[1:], rtol=1e-8)


def test_record_every_subsamples_the_same_values():
    g = TimeGrid.uniform(1.0, 0.01)
    full = influence_m(ConstAccel(2.0), Gaussian(0.5), Spectrum("superohmic"), g, rtol=1e-8)
    sub = influence_m(ConstAccel(2.0), Gaussian(0.5), Spectrum("superohmic"), g, rtol=1e-8,
                      record_every=10)
    np.testing.assert_array_equal(sub.nodes, full.nodes[::10])
    np.testing.assert_allclose(sub.values, full.values[::10], rtol=1e-7)


def test_deterministic():
    g = TimeGrid.uniform(1.0, 0.01)
    run = lambda: influence_m(ConstAccel(5.0), Gaussian(0.3), Spectrum("uniform"), g).values
    np.testing.assert_array_equal(run(), run())


def test_unknown_method_rejected():
    with pytest.raises(ValueError):
        influence_m(Static(), Unity(), Spectrum("ohmic"), TimeGrid.uniform(1.0, 0.1), method="magic")
    with pytest.raises(ValueError):
        influence_m(ConstAccel(1.0), Unity(), Spectrum("ohmic"), TimeGrid.uniform(1.0, 0.1),
                    method="stationary")
