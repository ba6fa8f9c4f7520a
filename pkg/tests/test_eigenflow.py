import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from prflow.eigenflow import (EigenFlowState, blow_up_time, eigen_closed_form, eigen_rk4,
                              ric_n_flow, ric_n_margin, tsharp_eigen_flow)
from prflow.errors import BlowUp


@given(mu0=st.floats(0.0, 5.0), phi=st.floats(0.5, 5.0), t=st.floats(0.0, 0.5))
def test_closed_form_solves_ode(mu0, phi, t):
    assume(mu0 <= phi)
    h = 1e-6
    mu = eigen_closed_form(mu0, phi, t + h)
    deriv = (eigen_closed_form(mu0, phi, t + 2 * h) - eigen_closed_form(mu0, phi, t)) / (2 * h)
    assert deriv == pytest.approx(4 * mu * (mu - phi), abs=1e-5 * max(1.0, phi**2))


def test_fixed_points_and_limits():
    assert eigen_closed_form(0.0, 2.0, 3.0) == 0.0
    assert eigen_closed_form(2.0, 2.0, 3.0) == pytest.approx(2.0)
    assert eigen_closed_form(1.0, 2.0, 50.0) == pytest.approx(0.0, abs=1e-12)
    assert eigen_closed_form(1.0, 2.0, -50.0) == pytest.approx(2.0, abs=1e-12)
    assert eigen_closed_form(1.0, -2.0, -1e4) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("mu0, phi, expected", [(3.0, 2.0, math.log(3.0) / 8.0), (2.0, 0.0, 0.125),
                                                 (1.0, -1.0, math.log(2.0) / 4.0)])
def test_blow_up_time(mu0, phi, expected):
    assert blow_up_time(mu0, phi) == pytest.approx(expected)
    with pytest.raises(BlowUp):
        eigen_closed_form(mu0, phi, expected)


def test_no_blow_up_below_phi():
    assert blow_up_time(1.0, 2.0) is None and blow_up_time(0.0, -1.0) is None


def test_rk4_agrees_and_halts():
    r = eigen_rk4(1.0, 2.0, 1e-3, 1000)
    assert not r.halted and r.halt_time is None
    assert np.max(np.abs(r.values - eigen_closed_form(1.0, 2.0, r.times))) < 1e-10
    blow = eigen_rk4(3.0, 2.0, 1e-4, 5000)
    assert blow.halted
    assert blow.halt_time == pytest.approx(blow_up_time(3.0, 2.0), abs=1e-3)
    back = eigen_rk4(1.0, 2.0, -1e-3, 500)
    assert np.max(np.abs(back.values - eigen_closed_form(1.0, 2.0, back.times))) < 1e-10
    with pytest.raises(ValueError):
        eigen_rk4(1.0, 2.0, 0.0, 10)


def test_tsharp():
    t = np.linspace(0, 1, 5)
    assert np.allclose(tsharp_eigen_flow(1.2, 2.0, t) ** 2, eigen_closed_form(1.44, 2.0, t))
    with pytest.raises(ValueError):
        tsharp_eigen_flow(0.0, 1.0, 0.1)


def test_state_validation():
    with pytest.raises(ValueError):
        EigenFlowState((1.0, 2.0), 1.0, 3)
    with pytest.raises(ValueError):
        EigenFlowState((1.0, 2.0, 3.0), 1.0, 3)       # odd n needs a kernel
    with pytest.raises(ValueError):
        EigenFlowState((-1.0, 0.0), 1.0, 2)
    s = EigenFlowState((0.0, 0.5, 1.0), 1.0, 3)
    assert s.globally_defined
    assert not EigenFlowState((0.0, 2.0, 2.0), 1.0, 3).globally_defined


@given(st.lists(st.floats(0.0, 3.0), min_size=2, max_size=6), st.floats(3.0, 6.0), st.floats(0.0, 1.0))
def test_ric_n_inequality(mus, phi, t):
    """d/dt Ric_N >= (4/n) Ric_N^2 - 4 Phi Ric_N along the flow."""
    if len(mus) % 2:
        mus = mus + [0.0]
    state = EigenFlowState(tuple(mus), phi, len(mus))
    assert ric_n_margin(state, t) >= -1e-9 * max(1.0, phi * sum(mus)) ** 2
    assert ric_n_flow(state, t) == pytest.approx(sum(eigen_closed_form(m, phi, t) for m in mus))
