import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from prflow import scenarios
from prflow.errors import (BoundaryMismatch, ConfigError, InvalidBoundary, NonIntegrableBoundary,
                           NonVanishingEndpoints)
from prflow.flow import (BoundaryData, Constant, ExponentialApproach, FlowConfig, SineSeries,
                         Tabulated, evolve, forcing_coefficients, forcing_term,
                         improper_integral_delta, lift_U, sine_coefficients)
from prflow.geometry import WarpedProductMetric

PI = math.pi


def test_families():
    e = ExponentialApproach(1.0, 0.5, 2.0)
    assert e.value(0.0) == pytest.approx(1.5)
    assert e.ddelta(1.0) == pytest.approx(-2.0 * 0.5 * math.exp(-2.0))
    with pytest.raises(ConfigError):
        ExponentialApproach(1.0, 0.5, 0.0)
    tab = Tabulated((0.0, 1.0, 2.0), (3.0, 2.0, 2.0))
    assert tab.mu_tilde == 2.0 and tab.delta(0.5) == pytest.approx(0.5)
    with pytest.raises(ConfigError):
        Tabulated((0.0, 0.0, 1.0), (1.0, 1.0, 1.0))
    assert improper_integral_delta(e) == (0.25, -0.5)
    with pytest.raises(NonIntegrableBoundary):
        improper_integral_delta(tab)


def test_lift_and_forcing():
    bd = BoundaryData(ExponentialApproach(1.0, 0.5, 1.0), ExponentialApproach(2.0, -0.3, 3.0))
    x = np.linspace(0, 2.0, 9)
    U = lift_U(bd, 0.0, x, 2.0)
    assert U[0] == pytest.approx(0.5) and U[-1] == pytest.approx(-0.3)
    # f = Phi U - U_t
    t, dt = 0.4, 1e-6
    ut = (lift_U(bd, t + dt, x, 2.0) - lift_U(bd, t - dt, x, 2.0)) / (2 * dt)
    assert np.allclose(forcing_term(bd, 3.0, t, x, 2.0), 3.0 * lift_U(bd, t, x, 2.0) - ut, atol=1e-8)


def test_forcing_coefficients_match_quadrature():
    bd = BoundaryData(ExponentialApproach(0.0, 0.5, 1.0), ExponentialApproach(0.0, 0.2, 2.0))
    l, t = 1.5, 0.3
    x = np.linspace(0, l, 4001)
    f = forcing_term(bd, 2.0, t, x, l)
    exact = forcing_coefficients(bd, 2.0, t, l, 6)
    for j in range(1, 7):
        quad = 2 / l * np.trapezoid(f * np.sin(PI * j * x / l), x)
        assert exact[j - 1] == pytest.approx(quad, abs=1e-6)


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=6))
def test_sine_roundtrip(coeffs):
    c = np.array(coeffs)
    series = SineSeries(2.0, c)
    x = np.linspace(0, 2.0, 401)
    back = sine_coefficients(series(x), 2.0, len(c)).coeffs
    assert np.allclose(back, c, atol=1e-8)


def test_sine_coefficients_need_zero_ends():
    with pytest.raises(NonVanishingEndpoints):
        sine_coefficients(np.ones(11), 1.0, 4)


def test_flow_config_validation():
    for kw in ({"dt": 0.0}, {"t_end": 1e-5}, {"m": 4}, {"backend": "x"}, {"J": 2},
               {"snapshot_stride": 0}):
        base = dict(phi_param=0.0, t_end=1.0, dt=1e-3, m=50)
        base.update(kw)
        with pytest.raises(ConfigError):
            FlowConfig(**base)
    cfg = FlowConfig(0.0, 1.0, 0.3, 10, snapshot_stride=2)
    assert cfg.nsteps == 4 and cfg.step == 0.25
    assert list(cfg.snapshot_steps()) == [0, 2, 4]


def test_initial_data_must_match_boundary():
    phi0 = WarpedProductMetric(1.0, 1, np.ones(21))
    with pytest.raises(BoundaryMismatch):
        evolve(phi0, BoundaryData.constant(2.0, 1.0), FlowConfig(0.0, 0.1, 0.01, 20))
    with pytest.raises(ConfigError):
        evolve(phi0, BoundaryData.constant(1.0, 1.0), FlowConfig(0.0, 0.1, 0.01, 40))
    with pytest.raises(InvalidBoundary):
        bd = BoundaryData(ExponentialApproach(-1.0, 2.0, 1.0), Constant(1.0))
        evolve(phi0, bd, FlowConfig(0.0, 2.0, 0.01, 20))


def test_exact_mode(a1_run):
    _, _, _, runs = a1_run
    for tr in runs.values():
        assert abs(tr.times[-1] - 1.0) < 1e-12
        err = np.max(np.abs(tr.values[-1] - scenarios.exact_mode_solution(tr.x, 1.0)))
        assert err <= 1e-4


def test_stationary_initial_data_is_fixed_point():
    phi_param = 2.0
    from prflow.stationary import stationary_solution
    st_ = stationary_solution(phi_param, 1.0, 1.0, 2.0)
    phi0 = WarpedProductMetric(1.0, 1, st_.sample(100))
    runs = evolve(phi0, BoundaryData.constant(1.0, 2.0), FlowConfig(phi_param, 1.0, 1e-3, 100, "both"))
    assert np.max(np.abs(runs["spectral"].values - phi0.phi)) < 1e-12
    # the FD fixed point differs from phi_tilde by O(h^2)
    assert np.max(np.abs(runs["fd"].values - phi0.phi)) < 1e-4


@given(a=st.floats(0.1, 2.0), b=st.floats(0.1, 2.0))
def test_linearity(a, b):
    """The reduced flow is linear: data (phi0, mu) -> solution is additive."""
    m = 40
    x = np.linspace(0, 1, m + 1)
    cfg = FlowConfig(3.0, 0.2, 2e-3, m, "both", snapshot_stride=10)
    p1, bd1 = 1 + x * (1 - x), BoundaryData(ExponentialApproach(0.5, 0.5, 1.0), Constant(1.0))
    p2, bd2 = np.sin(PI * x) + 2 * x, BoundaryData.constant(0.0, 2.0)
    comb = BoundaryData(ExponentialApproach(0.5 * a, 0.5 * a, 1.0), Constant(a + 2 * b))
    r1 = evolve(WarpedProductMetric(1, 1, p1), bd1, cfg)
    r2 = evolve(WarpedProductMetric(1, 1, p2), bd2, cfg)
    r = evolve(WarpedProductMetric(1, 1, a * p1 + b * p2), comb, cfg)
    for key in ("fd", "spectral"):
        assert np.allclose(r[key].values, a * r1[key].values + b * r2[key].values, atol=1e-10)


def test_tabulated_matches_closed_form():
    """Quadrature path (tabulated boundary) vs closed-form path."""
    m = 100
    bd = BoundaryData(ExponentialApproach(1.0, 0.5, 1.0), Constant(1.0))
    ts = np.linspace(0, 2.0, 4001)
    tab = BoundaryData(Tabulated(tuple(ts), tuple(bd.left.value(ts))), Constant(1.0))
    x = np.linspace(0, 1, m + 1)
    phi0 = WarpedProductMetric(1, 1, 1.5 - 0.5 * x + 0.2 * np.sin(PI * x))
    cfg = FlowConfig(1.0, 2.0, 1e-3, m, "spectral", snapshot_stride=100)
    a = evolve(phi0, bd, cfg)["spectral"]
    b = evolve(phi0, tab, cfg)["spectral"]
    # tabulated limit value is the last entry, not 1; compare absolute profiles
    assert np.max(np.abs(a.values - b.values)) < 1e-5


def test_divergence_flag():
    x = np.linspace(0, 1, 41)
    phi0 = WarpedProductMetric(1, 1, np.sin(PI * x))
    cfg = FlowConfig(900.0, 1.0, 1e-3, 40, "both", snapshot_stride=10)
    runs = evolve(phi0, BoundaryData.constant(0.0, 0.0), cfg)
    for tr in runs.values():
        assert tr.diverged and tr.divergence_time < 1.0
        assert np.all(np.isfinite(tr.values))


def test_backends_agree_on_subcritical(a2_run):
    _, _, cfg, runs = a2_run
    fd, sp = runs["fd"], runs["spectral"]
    assert fd.times.shape == sp.times.shape
    assert np.max(np.abs(fd.values - sp.values)) < 1e-3


def test_snapshot_lookup(a2_run):
    tr = a2_run[3]["fd"]
    assert tr.times[tr.at(1.0)] == pytest.approx(1.0)
    with pytest.raises(KeyError):
        tr.at(1.0005)
