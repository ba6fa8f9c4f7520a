"""Normalised flow on geodesic Riemannian foliations (A = 0, T != 0).

R_N = -(T#)^2 is parallel along N, so the flow reduces to one scalar ODE
per eigenvalue of R_N,

    d mu / dt = 4 mu (mu - Phi),

and T# (eigenvalues +-i theta, theta^2 = mu) obeys d theta/dt = 2 theta (theta^2 - Phi).
"""
from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .errors import BlowUp

RK4_CAP = 1e15


def blow_up_time(mu0: float, phi_param: float):
    """Forward time at which mu(t) becomes infinite, or None.

    Finite exactly when mu0 > max(Phi, 0): the denominator
    mu0 + (Phi - mu0) e^{4 Phi t} then vanishes at
    t* = log(mu0 / (mu0 - Phi)) / (4 Phi), or 1/(4 mu0) when Phi = 0.
    """
    if mu0 <= 0 or mu0 <= phi_param:
        return None
    if phi_param == 0.0:
        return 1.0 / (4.0 * mu0)
    return -math.log1p(-phi_param / mu0) / (4.0 * phi_param)


def eigen_closed_form(mu0: float, phi_param: float, t):
    """mu(t) = Phi mu0 / (mu0 + (Phi - mu0) e^{4 Phi t}); mu0/(1 - 4 mu0 t) for Phi = 0.

    Raises BlowUp if some requested t lies at or beyond the blow-up time.
    """
    if mu0 < 0:
        raise ValueError(f"eigenvalue must be >= 0, got {mu0}")
    t_arr = np.asarray(t, dtype=float)
    t_star = blow_up_time(mu0, phi_param)
    if t_star is not None and np.any(t_arr >= t_star):
        raise BlowUp(t_star)
    if mu0 == 0.0:
        return np.zeros_like(t_arr) if t_arr.ndim else 0.0
    with np.errstate(over="ignore"):
        if phi_param == 0.0:
            out = mu0 / (1.0 - 4.0 * mu0 * t_arr)
        else:
            # divide through by the larger exponential to stay finite as |t| grows
            e = np.exp(-4.0 * phi_param * t_arr)
            out = phi_param * mu0 * e / (mu0 * e + (phi_param - mu0))
            big = ~np.isfinite(e)
            if np.any(big):
                out = np.where(big, phi_param, out)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class RK4Trajectory:
    times: np.ndarray
    values: np.ndarray
    halted: bool            # True when |mu| exceeded RK4_CAP (suspected blow-up)

    @property
    def halt_time(self):
        return float(self.times[-1] + (self.times[1] - self.times[0])) if self.halted else None


def eigen_rk4(mu0: float, phi_param: float, dt: float, steps: int, cap: float = RK4_CAP) -> RK4Trajectory:
    """Classical RK4 for d mu/dt = 4 mu (mu - Phi) (negative dt integrates backwards)."""
    if dt == 0 or steps < 0:
        raise ValueError("need dt != 0 and steps >= 0")
    values, halted = kernels.rk4_logistic(float(mu0), float(phi_param), float(dt), int(steps), float(cap))
    values = np.asarray(values)
    return RK4Trajectory(dt * np.arange(values.size), values, bool(halted))


def tsharp_eigen_flow(theta0: float, phi_param: float, t):
    """theta(t) = sqrt(mu(t)) with mu0 = theta0^2."""
    if not theta0 > 0:
        raise ValueError(f"theta0 must be positive, got {theta0}")
    return np.sqrt(eigen_closed_form(theta0 * theta0, phi_param, t))


@dataclass(frozen=True)
class EigenFlowState:
    mus: tuple
    phi_param: float
    n: int

    def __post_init__(self):
        mus = tuple(float(m) for m in np.atleast_1d(self.mus))
        object.__setattr__(self, "mus", mus)
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if len(mus) != self.n:
            raise ValueError(f"need n = {self.n} eigenvalues, got {len(mus)}")
        if any(m < 0 or not math.isfinite(m) for m in mus):
            raise ValueError("eigenvalues of R_N = -(T#)^2 are >= 0")
        if self.n % 2 == 1 and all(m > 0 for m in mus):
            raise ValueError("odd n forces a zero eigenvalue of the skew operator T#")

    @property
    def globally_defined(self) -> bool:
        return all(m <= self.phi_param for m in self.mus)

    def at(self, t) -> np.ndarray:
        return np.array([eigen_closed_form(m, self.phi_param, t) for m in self.mus])


def ric_n_flow(state: EigenFlowState, t):
    """Ric_N(t) = sum of the evolved eigenvalues."""
    return np.sum(state.at(t), axis=0)


def ric_n_margin(state: EigenFlowState, t) -> np.ndarray:
    """d/dt Ric_N - ((4/n) Ric_N^2 - 4 Phi Ric_N) along the flow.

    d/dt Ric_N = 4 tr(R_N^2) - 4 Phi Ric_N, so the margin is
    4 (sum mu_i^2 - (sum mu_i)^2 / n) >= 0 by Cauchy-Schwarz."""
    mu = state.at(t)
    ric = np.sum(mu, axis=0)
    dric = np.sum(4.0 * mu * (mu - state.phi_param), axis=0)
    return dric - (4.0 / state.n * ric**2 - 4.0 * state.phi_param * ric)
