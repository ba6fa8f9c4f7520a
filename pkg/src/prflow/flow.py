"""Warping-function flow d_t phi = phi_xx + Phi phi with Dirichlet data.

Two independent backends:

* :func:`evolve_fd` -- Crank-Nicolson on the uniform grid, boundary data at
  the half step, one tridiagonal solve per step (``prflow.kernels``).
* :func:`evolve_spectral` -- split phi = phi_tilde + U + v, where phi_tilde
  is stationary, U interpolates the boundary deviations linearly and v
  vanishes at both ends; each sine coefficient of v obeys a scalar linear
  ODE that is integrated exactly (variation of constants).
"""
from dataclasses import dataclass
import math
from typing import Optional, Union

import numpy as np
from scipy.integrate import simpson

from . import kernels
from .errors import (BoundaryMismatch, ConfigError, InvalidBoundary,
                     NonIntegrableBoundary, NonVanishingEndpoints, SingularDenominator)
from .geometry import WarpedProductMetric
from .stationary import Regime, sinpi, stationary_solution

OVERFLOW_LIMIT = 1e300
BOUNDARY_TOL = 1e-8


# ---------------------------------------------------------------------------
# boundary data


@dataclass(frozen=True)
class Constant:
    mu_tilde: float

    def value(self, t):
        return np.full_like(np.asarray(t, dtype=float), self.mu_tilde)

    def delta(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))

    def ddelta(self, t):
        return np.zeros_like(np.asarray(t, dtype=float))


@dataclass(frozen=True)
class ExponentialApproach:
    """mu(t) = mu_tilde + delta0 * exp(-rate t)."""
    mu_tilde: float
    delta0: float
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ConfigError(f"rate must be positive, got {self.rate}")

    def value(self, t):
        return self.mu_tilde + self.delta(t)

    def delta(self, t):
        return self.delta0 * np.exp(-self.rate * np.asarray(t, dtype=float))

    def ddelta(self, t):
        return -self.rate * self.delta(t)


@dataclass(frozen=True)
class Tabulated:
    """Piecewise-linear boundary values; the derivative is taken by second
    order differences of the table and interpolated.  The limit value is
    taken to be the last entry."""
    times: tuple
    values: tuple

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.ndim != 1 or t.shape != v.shape or t.size < 3:
            raise ConfigError("tabulated boundary needs >= 3 (time, value) pairs")
        if np.any(np.diff(t) <= 0):
            raise ConfigError("tabulated times must be strictly increasing")
        object.__setattr__(self, "times", tuple(t))
        object.__setattr__(self, "values", tuple(v))

    @property
    def mu_tilde(self):
        return self.values[-1]

    def value(self, t):
        return np.interp(t, self.times, self.values)

    def delta(self, t):
        return self.value(t) - self.mu_tilde

    def ddelta(self, t):
        slope = np.gradient(np.asarray(self.values), np.asarray(self.times), edge_order=2)
        return np.interp(t, self.times, slope, right=0.0)


Family = Union[Constant, ExponentialApproach, Tabulated]


@dataclass(frozen=True)
class BoundaryData:
    left: Family
    right: Family

    @property
    def families(self):
        return (self.left, self.right)

    @property
    def mu_tilde(self):
        return (self.left.mu_tilde, self.right.mu_tilde)

    def mu(self, t):
        return self.left.value(t), self.right.value(t)

    def delta(self, t):
        return self.left.delta(t), self.right.delta(t)

    def ddelta(self, t):
        return self.left.ddelta(t), self.right.ddelta(t)

    @property
    def closed_form(self) -> bool:
        return not any(isinstance(f, Tabulated) for f in self.families)

    def check_nonnegative(self, times):
        m0, m1 = self.mu(np.asarray(times, dtype=float))
        if np.min(m0) < 0 or np.min(m1) < 0:
            raise InvalidBoundary("boundary data must stay nonnegative")

    @classmethod
    def constant(cls, mu0, mu1):
        return cls(Constant(mu0), Constant(mu1))


def relative_to(bd: BoundaryData, mu_ref) -> "_Shifted":
    return _Shifted(bd, tuple(float(v) for v in mu_ref))


@dataclass(frozen=True)
class _Shifted:
    """Boundary deviations delta_j = mu_j - ref_j for a chosen reference."""
    bd: BoundaryData
    ref: tuple

    def delta(self, t):
        m0, m1 = self.bd.mu(t)
        return m0 - self.ref[0], m1 - self.ref[1]

    def ddelta(self, t):
        return self.bd.ddelta(t)


def _deviation(bd):
    if isinstance(bd, _Shifted):
        return bd
    return _Shifted(bd, tuple(float(v) for v in bd.mu_tilde))


def lift_U(bd, t, x, l):
    """U(t, x) = delta0(t) (l - x)/l + delta1(t) x/l."""
    d0, d1 = _deviation(bd).delta(t)
    s = np.asarray(x, dtype=float) / l
    return (1.0 - s) * d0 + s * d1


def forcing_term(bd, phi_param, t, x, l):
    """f = Phi U - d_t U."""
    dev = _deviation(bd)
    d0, d1 = dev.delta(t)
    p0, p1 = dev.ddelta(t)
    s = np.asarray(x, dtype=float) / l
    return (phi_param * d0 - p0) + s * (phi_param * (d1 - d0) + p0 - p1)


def forcing_coefficients(bd, phi_param, t, l, J):
    """Exact sine coefficients f_j(t), j = 1..J, of the linear forcing.

    Uses the expansions of 1 and x/l; returns shape (J,) or (len(t), J).
    """
    dev = _deviation(bd)
    d0, d1 = dev.delta(t)
    p0, p1 = dev.ddelta(t)
    A = np.asarray(phi_param * d0 - p0, dtype=float)[..., None]
    B = np.asarray(phi_param * (d1 - d0) + p0 - p1, dtype=float)[..., None]
    j = np.arange(1, J + 1)
    sign = (-1.0) ** j
    return 2.0 / (np.pi * j) * ((1.0 - sign) * A - sign * B)


# ---------------------------------------------------------------------------
# sine series


@dataclass(frozen=True)
class SineSeries:
    l: float
    coeffs: np.ndarray

    def __call__(self, x):
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        j = np.arange(1, len(self.coeffs) + 1)
        y = self.coeffs @ sinpi_modes(xa / self.l, j)
        return y if np.ndim(x) else float(y[0])


def sinpi_modes(s, j):
    """Matrix sin(pi j s) of shape (len(j), len(s)), exact zeros at s = 0, 1."""
    s = np.asarray(s, dtype=float)
    js = np.outer(j, s)
    # reduce j*s mod 2 so that integer multiples land exactly on 0
    r = np.mod(js, 2.0)
    return np.where(r <= 1.0, sinpi(np.minimum(r, 1.0)), -sinpi(np.clip(r - 1.0, 0.0, 1.0)))


def sine_coefficients(samples, l, J, tol=BOUNDARY_TOL) -> SineSeries:
    """c_j = (2/l) int_0^l f(s) sin(pi j s/l) ds, composite Simpson."""
    f = np.asarray(samples, dtype=float)
    scale = max(1.0, float(np.max(np.abs(f))))
    if abs(f[0]) > tol * scale or abs(f[-1]) > tol * scale:
        raise NonVanishingEndpoints((float(f[0]), float(f[-1])))
    m = f.size - 1
    x = np.linspace(0.0, l, m + 1)
    S = sinpi_modes(x / l, np.arange(1, J + 1))
    c = (2.0 / l) * simpson(S * f, x=x, axis=-1)
    return SineSeries(l, c)


# ---------------------------------------------------------------------------
# configuration and trajectories


@dataclass(frozen=True)
class FlowConfig:
    phi_param: float
    t_end: float
    dt: float
    m: int
    backend: str = "fd"
    J: Optional[int] = None
    snapshot_stride: int = 1

    def __post_init__(self):
        if not self.dt > 0:
            raise ConfigError("dt must be positive")
        if not self.t_end >= self.dt:
            raise ConfigError("t_end must be >= dt")
        if self.m < 8:
            raise ConfigError("m must be >= 8")
        if self.J is not None and self.J < 4:
            raise ConfigError("J must be >= 4")
        if self.snapshot_stride < 1:
            raise ConfigError("snapshot_stride must be >= 1")
        if self.backend not in ("fd", "spectral", "both"):
            raise ConfigError(f"unknown backend {self.backend!r}")
        if not math.isfinite(self.phi_param):
            raise ConfigError("Phi must be finite")

    @property
    def nsteps(self) -> int:
        return max(1, int(math.ceil(self.t_end / self.dt - 1e-9)))

    @property
    def step(self) -> float:
        """Time step actually used: t_end split into nsteps equal steps."""
        return self.t_end / self.nsteps

    @property
    def modes(self) -> int:
        return self.J if self.J is not None else max(4, self.m // 2)

    def snapshot_steps(self) -> np.ndarray:
        n, s = self.nsteps, self.snapshot_stride
        steps = np.arange(0, n + 1, s)
        if steps[-1] != n:
            steps = np.append(steps, n)
        return steps


@dataclass(frozen=True)
class Trajectory:
    l: float
    n: int
    times: np.ndarray
    values: np.ndarray          # shape (snapshots, m + 1)
    backend: str
    boundary: Optional[BoundaryData] = None
    phi_param: float = 0.0
    diverged: bool = False
    divergence_time: Optional[float] = None
    tail_estimate: Optional[float] = None

    @property
    def m(self) -> int:
        return self.values.shape[1] - 1

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.l, self.m + 1)

    @property
    def dx(self) -> float:
        return self.l / self.m

    @property
    def snapshots(self):
        return [WarpedProductMetric(self.l, self.n, row) for row in self.values]

    def at(self, t, tol=1e-9):
        """Index of the snapshot at time t."""
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(self.times[k] - t) > tol * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t={t}")
        return k


def constant_trajectory(metric: WarpedProductMetric, times, phi_param=0.0, boundary=None):
    times = np.asarray(times, dtype=float)
    values = np.tile(metric.phi, (times.size, 1))
    return Trajectory(metric.l, metric.n, times, values, "constant", boundary, phi_param)


def _check_initial(phi0: WarpedProductMetric, bd: BoundaryData, cfg: FlowConfig):
    if phi0.m != cfg.m:
        raise ConfigError(f"grid mismatch: metric has m={phi0.m}, config has m={cfg.m}")
    m0, m1 = bd.mu(0.0)
    gap = max(abs(phi0.phi[0] - float(m0)), abs(phi0.phi[-1] - float(m1)))
    if gap > BOUNDARY_TOL * max(1.0, float(np.max(np.abs(phi0.phi)))):
        raise BoundaryMismatch(gap)


def _set_boundary(values, times, bd):
    m0, m1 = bd.mu(times)
    values[:, 0] = m0
    values[:, -1] = m1
    return values


def evolve_fd(phi0: WarpedProductMetric, bd: BoundaryData, cfg: FlowConfig) -> Trajectory:
    """Crank-Nicolson march; stops early (``diverged=True``) once the
    solution exceeds 1e300."""
    _check_initial(phi0, bd, cfg)
    bd.check_nonnegative(cfg.snapshot_steps() * cfg.step)
    nsteps, dt, h = cfg.nsteps, cfg.step, phi0.dx
    r = dt / h**2
    t_half = (np.arange(nsteps) + 0.5) * dt
    left, right = (np.ascontiguousarray(v, dtype=float) for v in bd.mu(t_half))
    snaps, done = kernels.cn_march(
        np.ascontiguousarray(phi0.phi[1:-1]), r, 0.5 * cfg.phi_param * dt,
        left, right, nsteps, cfg.snapshot_stride, OVERFLOW_LIMIT)
    steps = cfg.snapshot_steps()
    steps = steps[steps <= done][: len(snaps)]
    times = steps * dt
    values = np.empty((len(steps), phi0.m + 1))
    values[:, 1:-1] = snaps
    _set_boundary(values, times, bd)
    diverged = done < nsteps
    return Trajectory(phi0.l, phi0.n, times, values, "fd", bd, cfg.phi_param,
                      diverged, (done + 1) * dt if diverged else None)


def reference_state(phi_param, l, bd: BoundaryData):
    """Stationary profile and boundary reference used by the spectral split.

    Where no stationary solution exists (resonance with mu1 != -mu0, or a
    higher resonance) the reference is phi_tilde = 0 and U interpolates the
    full boundary data.
    """
    mu0, mu1 = bd.mu_tilde
    try:
        st = stationary_solution(phi_param, l, mu0, mu1)
    except SingularDenominator:
        st = None
    if st is None or st.regime == Regime.RESONANCE_UNSOLVABLE:
        return (lambda x: np.zeros_like(np.asarray(x, dtype=float))), (0.0, 0.0), st
    return st.phi_tilde, (mu0, mu1), st


def _phi1_weight(lam, rate, t):
    """int_0^t exp(lam (t - s)) exp(-rate s) ds, stable for lam + rate ~ 0
    and for strongly damped modes."""
    gap = np.abs(lam + rate) * t
    with np.errstate(over="ignore", invalid="ignore"):
        # exp(max(lam, -rate) t) * (1 - exp(-|lam + rate| t)) / |lam + rate|
        ratio = np.where(gap < 1e-12, 1.0, -np.expm1(-gap) / np.where(gap == 0, 1.0, gap))
        return t * np.exp(np.maximum(lam, -rate) * t) * ratio


def _exponential_sources(bd, ref):
    """Write each deviation delta_e(t) = mu_e(t) - ref_e as a sum of
    amp * exp(-rate t) terms; yields (end, amp, rate)."""
    for end, fam in enumerate(bd.families):
        offset = fam.mu_tilde - ref[end]
        if offset != 0.0:
            yield end, offset, 0.0
        if isinstance(fam, ExponentialApproach) and fam.delta0 != 0.0:
            yield end, fam.delta0, fam.rate


def _forced_closed_form(bd, ref, phi_param, l, lam, times):
    """Forced part of v_j(t) for Constant/ExponentialApproach families."""
    J = lam.size
    j = np.arange(1, J + 1)
    sign = (-1.0) ** j
    out = np.zeros((times.size, J))
    for end, amp, rate in _exponential_sources(bd, ref):
        # f = A + (x/l) B with A = Phi d0 - d0', B = Phi (d1 - d0) + d0' - d1'
        g = (phi_param + rate) * amp
        A, B = (g, -g) if end == 0 else (0.0, g)
        fj = 2.0 / (np.pi * j) * ((1.0 - sign) * A - sign * B)
        out += _phi1_weight(lam[None, :], rate, times[:, None]) * fj[None, :]
    return out


def _forced_quadrature(dev, phi_param, l, lam, times, dt_max, nodes=8):
    """Forced part by stepping v_j(t+h) = e^{lam h} v_j(t) + int e^{lam(t+h-s)} f_j(s) ds,
    the integral by Gauss-Legendre on each step."""
    J = lam.size
    xg, wg = np.polynomial.legendre.leggauss(nodes)
    out = np.zeros((times.size, J))
    v = np.zeros(J)
    t_prev = 0.0
    for k, t_target in enumerate(times):
        span = t_target - t_prev
        if span > 0:
            nsub = max(1, int(math.ceil(span / dt_max - 1e-9)))
            h = span / nsub
            for i in range(nsub):
                a = t_prev + i * h
                s = a + 0.5 * h * (xg + 1.0)
                f = forcing_coefficients(dev, phi_param, s, l, J)      # (nodes, J)
                wts = 0.5 * h * wg[:, None] * np.exp(lam[None, :] * (a + h - s)[:, None])
                v = np.exp(lam * h) * v + np.sum(wts * f, axis=0)
        out[k] = v
        t_prev = t_target
    return out


def evolve_spectral(phi0: WarpedProductMetric, bd: BoundaryData, cfg: FlowConfig) -> Trajectory:
    """Sine-series solution with exact exponential integration of each mode."""
    _check_initial(phi0, bd, cfg)
    bd.check_nonnegative(cfg.snapshot_steps() * cfg.step)
    l, J = phi0.l, cfg.modes
    x = phi0.x
    phi_tilde, ref, _ = reference_state(cfg.phi_param, l, bd)
    dev = relative_to(bd, ref)
    pt = phi_tilde(x)
    v0 = phi0.phi - pt - lift_U(dev, 0.0, x, l)
    v0[0] = v0[-1] = 0.0
    coeffs = sine_coefficients(v0, l, J).coeffs
    j = np.arange(1, J + 1)
    lam = cfg.phi_param - (np.pi * j / l) ** 2

    times = cfg.snapshot_steps() * cfg.step
    with np.errstate(over="ignore", invalid="ignore"):
        modes = np.exp(np.outer(times, lam)) * coeffs[None, :]
        if bd.closed_form:
            modes = modes + _forced_closed_form(bd, ref, cfg.phi_param, l, lam, times)
        else:
            modes = modes + _forced_quadrature(dev, cfg.phi_param, l, lam, times, cfg.step)
        values = modes @ sinpi_modes(x / l, j) + pt[None, :] + lift_U(dev, times[:, None], x[None, :], l)

    ok = np.all(np.isfinite(values), axis=1) & (np.max(np.abs(values), axis=1) <= OVERFLOW_LIMIT)
    diverged = not bool(np.all(ok))
    keep = len(ok) if not diverged else int(np.argmin(ok))
    values = values[:keep]
    times = times[:keep]
    _set_boundary(values, times, bd)
    tail = _tail_estimate(coeffs)
    return Trajectory(l, phi0.n, times, values, "spectral", bd, cfg.phi_param,
                      diverged, float(cfg.snapshot_steps()[keep] * cfg.step) if diverged else None,
                      tail)


def _tail_estimate(coeffs):
    """Estimate sum_{j>J} |v_j^0| from the decay of the last coefficients,
    fitting |c_j| ~ C j^-p over the upper half of the spectrum."""
    J = coeffs.size
    j = np.arange(1, J + 1)
    sel = (j > J // 2) & (np.abs(coeffs) > 1e-300)
    if sel.sum() < 3:
        return 0.0
    p, logC = np.polyfit(np.log(j[sel]), np.log(np.abs(coeffs[sel])), 1)
    p = -p
    if p <= 1.0:
        return float("inf")
    return float(np.exp(logC) * J ** (1.0 - p) / (p - 1.0))


def evolve(phi0, bd, cfg):
    """Dispatch on ``cfg.backend``; returns a dict backend -> Trajectory."""
    out = {}
    if cfg.backend in ("fd", "both"):
        out["fd"] = evolve_fd(phi0, bd, cfg)
    if cfg.backend in ("spectral", "both"):
        out["spectral"] = evolve_spectral(phi0, bd, cfg)
    return out


def improper_integral_delta(fam):
    """(int_0^inf delta, int_0^inf delta') for a family converging to 0."""
    if isinstance(fam, Tabulated):
        raise NonIntegrableBoundary("improper integrals are not available for tabulated data")
    if isinstance(fam, Constant):
        return 0.0, 0.0
    return fam.delta0 / fam.rate, -fam.delta0
