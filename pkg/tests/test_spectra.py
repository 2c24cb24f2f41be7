import math

import numpy as np
import pytest
from scipy.integrate import quad

from majorana_worldlines.spectra import Spectrum, thermal_factor, unruh_temperature


def test_uniform_vanishes_below_ir_cutoff():
    assert Spectrum("uniform", q=1, lambda_ir=0.02)(0.01) == 0.0
    assert Spectrum("uniform", q=2, lambda_ir=0.02)(0.5) == pytest.approx(8.0)


def test_superohmic_point_value():
    assert Spectrum("superohmic", q=1, lambda_uv=10)(10.0) == pytest.approx(0.1 * math.exp(-1), rel=1e-15)


@pytest.mark.parametrize("kind", ["uniform", "ohmic", "subohmic", "superohmic"])
def test_even_in_frequency(kind):
    sp = Spectrum(kind)
    w = np.array([0.3, 5.0, 17.0])
    np.testing.assert_array_equal(sp(w), sp(-w))


def test_ohmic_family_exponents():
    w, lam = 3.0, 10.0
    for kind, Q in (("ohmic", 1.0), ("subohmic", 0.5), ("superohmic", 2.0)):
        ref = (1 / w) * (w / lam) ** (Q + 1) * math.exp(-(w / lam) ** 2)
        assert Spectrum(kind, lambda_uv=lam)(w) == pytest.approx(ref, rel=1e-14)


def test_kind_aliases_and_errors():
    assert Spectrum("Super-Ohmic").kind == "superohmic"
    with pytest.raises(ValueError):
        Spectrum("lorentzian")
    with pytest.raises(ValueError):
        Spectrum("ohmic", lambda_uv=0)


@pytest.mark.parametrize("kind", ["uniform", "ohmic", "subohmic", "superohmic"])
@pytest.mark.parametrize("d", [1, 2])
def test_integrability_against_scipy(kind, d):
    sp = Spectrum(kind)
    pts = [sp.lambda_ir] if kind == "uniform" else None
    ref = 2 * quad(lambda w: w ** (d - 1) * float(sp(w)), sp.lower, sp.cutoff, points=pts,
                   limit=400, epsrel=1e-11)[0]
    assert sp.check_integrable(d) == pytest.approx(ref, rel=1e-7)


def test_cutoff_truncation_is_below_roundoff():
    sp = Spectrum("superohmic")
    assert sp(sp.cutoff) / sp(sp.lambda_uv) < 1e-14


def test_thermal_factor_values():
    assert thermal_factor(0.0, 3.0) == 1.0
    T = unruh_temperature(5.0)
    assert T == pytest.approx(5 / (2 * math.pi))
    assert thermal_factor(T, 1.0) == pytest.approx(1 / math.tanh(math.pi / 5), rel=1e-14)
    assert thermal_factor(0.7, 2.0) == thermal_factor(0.7, -2.0)
    assert math.isinf(thermal_factor(0.7, 0.0))
    with pytest.raises(ValueError):
        thermal_factor(-1.0, 1.0)


def test_with_coupling_scales_quadratically():
    sp = Spectrum("ohmic", q=1.0)
    assert sp.with_coupling(0.1)(2.0) == pytest.approx(0.01 * sp(2.0), rel=1e-14)
