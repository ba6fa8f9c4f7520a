
import numpy as np
import pytest
from hypothesis import given, strategies as st

from prflow.errors import BoundHypothesisViolated, InsufficientSnapshots, NonPositiveWarping
from prflow.flow import Trajectory, constant_trajectory
from prflow.geometry import (WarpedProductMetric, check_A_evolution, check_riccati,
                             check_rN_envelope, check_rN_evolution, check_tau1_evolution,
                             curvature_snapshot, d1, d2)


def test_metric_validation():
    with pytest.raises(ValueError):
        WarpedProductMetric(0.0, 1, np.ones(10))
    with pytest.raises(ValueError):
        WarpedProductMetric(1.0, 0, np.ones(10))
    with pytest.raises(ValueError):
        WarpedProductMetric(1.0, 1, np.ones(3))
    with pytest.raises(ValueError):
        WarpedProductMetric(1.0, 1, -np.ones(10))
    m = WarpedProductMetric(2.0, 3, np.ones(11))
    assert m.m == 10 and m.dx == pytest.approx(0.2)
    with pytest.raises(ValueError):
        m.phi[0] = 2.0


def test_stencils_exact_on_quadratics():
    x = np.linspace(0, 1, 21)
    f = 3 * x**2 - x + 2
    h = x[1] - x[0]
    assert np.allclose(d1(f, h), 6 * x - 1, atol=1e-10)
    assert np.allclose(d2(f, h), 6.0, atol=1e-8)


def test_curvature_of_exponential():
    """phi = e^{c x}: a = -c, rho = -c^2, mixed curvature -c^2."""
    c, n = 0.7, 3
    metric = WarpedProductMetric.from_function(lambda x: np.exp(c * x), 1.0, 400, n=n)
    snap = curvature_snapshot(metric)
    assert np.allclose(snap.a, -c, atol=1e-5)
    assert np.allclose(snap.rho, -c * c, atol=1e-4)
    assert np.allclose(snap.tau1, n * snap.a)
    assert np.allclose(snap.ric_n, n * snap.rho)


def test_curvature_rejects_zero_interior():
    phi = np.ones(11)
    phi[4] = 0.0
    with pytest.raises(NonPositiveWarping) as err:
        curvature_snapshot(WarpedProductMetric(1.0, 1, phi))
    assert err.value.index == 4


def test_endpoint_zero_gives_nan_not_error():
    metric = WarpedProductMetric.from_function(lambda x: np.sin(np.pi * x), 1.0, 50)
    snap = curvature_snapshot(metric)
    assert np.isnan(snap.a[0]) and np.isnan(snap.a[-1])
    assert np.allclose(snap.rho[5:-5], np.pi**2, rtol=1e-3)


@given(c=st.floats(0.1, 3.0), b=st.floats(0.0, 2.0), amp=st.floats(0.05, 0.9))
def test_riccati_second_order_on_smooth_profiles(c, b, amp):
    f = lambda x: 1.0 + amp * np.sin(c * x + b)
    coarse, fine = (check_riccati(WarpedProductMetric.from_function(f, 1.0, m)).sup for m in (200, 400))
    assert fine <= 1e-2
    assert fine <= coarse / 3.0 or fine <= 1e-8   # round-off floor ~ eps / h^2


@given(lam=st.floats(0.01, 100.0))
def test_riccati_scale_invariant(lam):
    """a and rho are invariant under phi -> lam phi."""
    f = lambda x: 2 + np.cos(2 * x)
    r1 = check_riccati(WarpedProductMetric.from_function(f, 1.0, 200)).sup
    r2 = check_riccati(WarpedProductMetric.from_function(lambda x: lam * f(x), 1.0, 200)).sup
    assert r2 == pytest.approx(r1, rel=1e-6, abs=1e-12)


def test_riccati_trim_validation():
    metric = WarpedProductMetric(1.0, 1, np.ones(20))
    with pytest.raises(ValueError):
        check_riccati(metric, trim=0.5)


def _exact_trajectory(m, dt, steps, phi_param=0.0):
    """phi = e^{(Phi - pi^2) t} sin(pi x) + 1: shifted heat solution."""
    x = np.linspace(0, 1, m + 1)
    times = dt * np.arange(steps)
    values = 1.0 + np.exp(-np.pi**2 * times)[:, None] * np.sin(np.pi * x)[None, :]
    return Trajectory(1.0, 2, times, values, "exact", None, phi_param)


def test_identities_on_exact_heat_solution():
    tr = _exact_trajectory(200, 1e-4, 50)
    assert check_A_evolution(tr).residual.sup < 1e-2
    tau = check_tau1_evolution(tr)
    assert tau.heat.residual.sup < 2e-2
    assert tau.forms_gap <= 1e-13 * max(tau.magnitude, 1.0)
    assert check_rN_evolution(tr).residual.sup < 5e-2


def test_identity_residuals_converge():
    res = [check_A_evolution(_exact_trajectory(m, 0.25 / m**2, 20)).residual.sup for m in (50, 100, 200)]
    assert res[0] / res[1] > 3.0 and res[1] / res[2] > 3.0


def test_identity_checks_need_snapshots():
    tr = _exact_trajectory(50, 1e-3, 2)
    with pytest.raises(InsufficientSnapshots):
        check_A_evolution(tr)


def test_stationary_trajectory_has_zero_time_derivative():
    metric = WarpedProductMetric.from_function(lambda x: 1 + x, 1.0, 100)
    tr = constant_trajectory(metric, np.linspace(0, 1, 5))
    chk = check_A_evolution(tr)
    assert chk.lhs_sup == 0.0
    assert chk.residual.sup < 1e-8


def test_envelope_holds_and_detects_violation():
    tr = _exact_trajectory(100, 1e-3, 30)
    rho_max = float(np.nanmax(np.abs(curvature_snapshot(tr.snapshots[0]).rho)))
    assert check_rN_envelope(tr, rho_max * 1.05)
    with pytest.raises(BoundHypothesisViolated):
        check_rN_envelope(tr, 0.5 * rho_max)
