import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from majorana_worldlines.dynamics import (ReducedState, evolve, late_time_limit, transition_prob_first,
                                          transition_prob_full, transition_rate)
from majorana_worldlines.influence import Gaussian, Unity


def test_zero_influence_is_identity():
    rho = ReducedState(0.7, 0.2 + 0.1j)
    out = evolve(rho, 0.0, 0.0)
    assert out == rho


def test_complete_decoherence_gives_gibbs_state():
    out = evolve(ReducedState(1.0, 0j), -800.0, -800.0)
    assert out.rho00 == pytest.approx(0.5, abs=1e-15)
    assert abs(out.rho01) < 1e-300


def test_half_decay():
    out = evolve(ReducedState(1.0), -math.log(2) / 2, -math.log(2) / 2)
    assert out.rho00 == pytest.approx(0.75, rel=1e-15)


def test_coherences_decay_separately():
    out = evolve(ReducedState(0.5, 0.3 + 0.2j), -0.1, -0.4)
    assert out.rho01.real == pytest.approx(0.3 * math.exp(-0.4))
    assert out.rho01.imag == pytest.approx(0.2 * math.exp(-0.1))


def test_positive_influence_rejected():
    with pytest.raises(ValueError):
        evolve(ReducedState(1.0), 0.1, 0.0)
    with pytest.raises(ValueError):
        transition_prob_full(0.0, 1e-6)


def test_invalid_state_rejected():
    with pytest.raises(ValueError):
        ReducedState(1.2)
    with pytest.raises(ValueError):
        ReducedState(0.9, 0.45)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 1), st.floats(0, 1), st.floats(0, 2 * math.pi),
       st.floats(-50, 0), st.floats(-50, 0))
def test_evolution_preserves_positivity(p, r, phi, i1, i2):
    rmax = math.sqrt(max(0.25 - (p - 0.5) ** 2, 0.0))
    rho = ReducedState(p, r * rmax * complex(math.cos(phi), math.sin(phi)))
    out = evolve(rho, i1, i2)
    assert out.is_positive(1e-12)
    assert np.all(np.linalg.eigvalsh(out.matrix()) >= -1e-12)


def test_trajectory_on_grid():
    nodes = np.linspace(0, 1, 5)
    I = -nodes
    traj = evolve(ReducedState(1.0), I, I, nodes)
    assert traj.rho00.shape == (5,)
    assert np.all(traj.is_positive())
    assert traj.state(0) == ReducedState(1.0)


def test_transition_probability_values():
    assert transition_prob_full(0.0, 0.0) == 0.0
    assert transition_prob_full(-1e3, -1e3) == pytest.approx(0.5)
    assert transition_prob_full(-0.1, -0.1) == pytest.approx(0.5 * (1 - math.exp(-0.2)), rel=1e-15)


def test_first_order_probability():
    assert transition_prob_first(0.0, 0.0, Gaussian(0.1)).value == 0.0
    res = transition_prob_first(-0.01, -0.03, Gaussian(0.1))
    assert float(res.value) == pytest.approx(0.02)
    assert not res.divergent
    assert transition_prob_first(-0.01, -0.03, Unity()).divergent


def test_full_and_first_order_agree_to_second_order():
    for s in (1e-2, 1e-3):
        full = transition_prob_full(-s, -s)
        first = float(transition_prob_first(-s, -s).value)
        assert abs(full - first) == pytest.approx(s * s, rel=2 * s)


def test_late_time_limit_flags_drift():
    t = np.linspace(0, 10, 1001)
    assert late_time_limit(np.exp(-t)).converged
    assert not late_time_limit(-t).converged


def test_rate_of_bounded_influence_extrapolates_to_zero():
    lad = transition_rate(lambda T: -2.0 * (1 - math.exp(-T)))
    assert abs(lad.extrapolated) < 1e-6
    assert lad.rates[-1] == pytest.approx(1.0 / 40, rel=1e-6)


def test_rate_of_linear_influence_plateaus():
    lad = transition_rate(lambda T: -0.3 * T - 1.0)
    assert lad.plateau
    assert lad.extrapolated == pytest.approx(0.15, rel=1e-12)


def test_rate_zero_coupling():
    lad = transition_rate(lambda T: 0.0)
    assert lad.extrapolated == 0.0 and lad.plateau
