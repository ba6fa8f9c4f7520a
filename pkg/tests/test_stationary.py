import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from prflow.errors import InvalidBoundary, MissingSolution, SingularDenominator
from prflow.stationary import (Regime, critical_phi, is_resonant, stationary_residual,
                               stationary_solution)

PI2 = math.pi**2


@pytest.mark.parametrize("phi, regime, stable", [
    (0.0, Regime.ZERO, True),
    (-3.0, Regime.NEGATIVE, True),
    (1.0, Regime.SUBCRITICAL_TRIG, True),
    (1.5 * PI2, Regime.SUPERCRITICAL, False),
])
def test_regimes(phi, regime, stable):
    res = stationary_solution(phi, 1.0, 1.0, 2.0)
    assert res.regime == regime
    assert res.stable_under_flow is stable
    x = np.linspace(0, 1, 401)
    y = res.phi_tilde(x)
    assert y[0] == 1.0 and y[-1] == 2.0


def test_zero_is_linear():
    res = stationary_solution(0.0, 2.0, 1.0, 3.0)
    assert np.allclose(res.phi_tilde(np.array([0.0, 1.0, 2.0])), [1.0, 2.0, 3.0])


@given(phi=st.floats(-50, 9.0), mu0=st.floats(0, 5), mu1=st.floats(0, 5))
def test_ode_residual_second_order(phi, mu0, mu1):
    res = stationary_solution(phi, 1.0, mu0, mu1)
    r1 = stationary_residual(res, phi, 100)
    r2 = stationary_residual(res, phi, 200)
    scale = max(1.0, mu0, mu1) * max(1.0, abs(phi)) ** 2
    assert r2 <= 1e-3 * scale
    if r1 > 1e-8 * scale:
        assert r2 <= r1 / 3.0


@given(mu0=st.floats(0, 5), mu1=st.floats(0, 5), lam=st.floats(0, 3))
def test_linear_in_boundary_data(mu0, mu1, lam):
    x = np.linspace(0, 1, 51)
    a = stationary_solution(2.0, 1.0, mu0, mu1).phi_tilde(x)
    b = stationary_solution(2.0, 1.0, lam * mu0, lam * mu1).phi_tilde(x)
    assert np.allclose(b, lam * a, atol=1e-12 * max(1.0, lam * max(mu0, mu1)))


@given(l=st.floats(0.2, 5.0), frac=st.floats(0.0, 0.95))
def test_scale_invariance(l, frac):
    """phi_tilde for (Phi, l) at x equals that for (Phi l^2, 1) at x / l."""
    phi = frac * critical_phi(l)
    s = np.linspace(0, 1, 41)
    a = stationary_solution(phi, l, 1.0, 2.0).phi_tilde(s * l)
    b = stationary_solution(phi * l * l, 1.0, 1.0, 2.0).phi_tilde(s)
    assert np.allclose(a, b, rtol=1e-10, atol=1e-12)


def test_resonance():
    assert is_resonant(PI2, 1.0) and not is_resonant(0.99 * PI2, 1.0)
    bad = stationary_solution(PI2, 1.0, 1.0, 2.0)
    assert bad.regime == Regime.RESONANCE_UNSOLVABLE and bad.phi_tilde is None
    with pytest.raises(MissingSolution):
        bad.sample(10)
    zero = stationary_solution(PI2, 1.0, 0.0, 0.0, family_C=0.7)
    assert zero.regime == Regime.RESONANCE_FAMILY
    assert zero.family_param == 0.7
    assert zero.phi_tilde(0.5) == pytest.approx(0.7)


def test_errors():
    with pytest.raises(InvalidBoundary):
        stationary_solution(1.0, 1.0, -1.0, 1.0)
    with pytest.raises(InvalidBoundary):
        stationary_solution(1.0, 0.0, 1.0, 1.0)
    with pytest.raises(SingularDenominator):
        stationary_solution(4 * PI2, 1.0, 1.0, 1.0)
