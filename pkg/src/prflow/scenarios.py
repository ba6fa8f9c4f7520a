"""Reference configurations used by the acceptance suite, ``prflow verify``
and the tests.  Each builder returns ``(phi0, bd, cfg)``."""
import math

import numpy as np

from .flow import BoundaryData, ExponentialApproach, FlowConfig, lift_U
from .geometry import WarpedProductMetric
from .stationary import stationary_solution

PI = math.pi


def exact_mode(m=200, dt=1e-4, t_end=1.0, stride=100, phi_param=0.0, backend="both"):
    """Phi = 0 (or given), l = 1, zero boundaries, phi0 = sin(pi x)."""
    x = np.linspace(0.0, 1.0, m + 1)
    phi0 = WarpedProductMetric(1.0, 1, np.sin(PI * np.minimum(x, 1.0 - x)))
    bd = BoundaryData.constant(0.0, 0.0)
    return phi0, bd, FlowConfig(phi_param, t_end, dt, m, backend, snapshot_stride=stride)


def exact_mode_solution(x, t, phi_param=0.0):
    return np.exp((phi_param - PI**2) * t) * np.sin(PI * np.asarray(x))


def subcritical(m=200, dt=1e-3, t_end=10.0, stride=10, backend="both", n=1):
    """Phi = pi^2/2 with exponentially relaxing boundary values 1 and 2."""
    phi_param = 0.5 * PI**2
    bd = BoundaryData(ExponentialApproach(1.0, 0.5, 1.0), ExponentialApproach(2.0, 0.5, 1.0))
    st = stationary_solution(phi_param, 1.0, 1.0, 2.0)
    x = np.linspace(0.0, 1.0, m + 1)
    phi = st.phi_tilde(x) + lift_U(bd, 0.0, x, 1.0) + 0.3 * x * (1.0 - x)
    phi0 = WarpedProductMetric(1.0, n, phi)
    return phi0, bd, FlowConfig(phi_param, t_end, dt, m, backend, snapshot_stride=stride)


def resonance(m=800, dt=1e-3, t_end=10.0, stride=10, backend="both"):
    """Phi = pi^2, mu_tilde = 0, delta_j = 0.2 e^{-t}, phi0 = 0.2 x(1-x) + U(0)."""
    bd = BoundaryData(ExponentialApproach(0.0, 0.2, 1.0), ExponentialApproach(0.0, 0.2, 1.0))
    x = np.linspace(0.0, 1.0, m + 1)
    phi0 = WarpedProductMetric(1.0, 1, 0.2 * x * (1.0 - x) + lift_U(bd, 0.0, x, 1.0))
    return phi0, bd, FlowConfig(PI**2, t_end, dt, m, backend, snapshot_stride=stride)


def supercritical(m=200, dt=2.5e-4, t_end=0.5, stride=20, backend="both"):
    """Phi = 2 pi^2, zero boundaries, sine initial data: growth rate pi^2."""
    phi0, bd, _ = exact_mode(m=m)
    return phi0, bd, FlowConfig(2.0 * PI**2, t_end, dt, m, backend, snapshot_stride=stride)


def resonance_frozen(m=200, dt=1e-3, t_end=1.0, stride=10, backend="both"):
    """Phi = pi^2 with boundary values frozen at 1: v_1 grows linearly."""
    bd = BoundaryData.constant(1.0, 1.0)
    phi0 = WarpedProductMetric(1.0, 1, np.ones(m + 1))
    return phi0, bd, FlowConfig(PI**2, t_end, dt, m, backend, snapshot_stride=stride)


ALL = {
    "A1": exact_mode,
    "A2": subcritical,
    "A3": resonance,
    "A4-exponential": supercritical,
    "A4-linear": resonance_frozen,
}
