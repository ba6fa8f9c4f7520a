"""Warped-product metrics dx^2 + phi(x)^2 gbar and their curvature.

For the foliation by the slices {x} x Mbar with unit normal N = d/dx the
shape data reduce to scalars times the identity of the fibre directions:

    a   = -phi_x / phi         (Weingarten operator A = a id)
    rho = -phi_xx / phi        (Jacobi operator R_N = rho id, mixed curvature)
    tau1 = n a,  Ric_N = Sc_mix = n rho

while T (integrability tensor) and omega (curvature of N-curves) vanish.
The identity checks below evaluate the reduced scalar forms of the Riccati
equation and of the evolution equations of a, tau1 and rho along a
trajectory of the flow.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import BoundHypothesisViolated, InsufficientSnapshots, NonPositiveWarping

POSITIVITY_FLOOR = 1e-12
NONNEG_SLACK = 1e-8


@dataclass(frozen=True)
class WarpedProductMetric:
    l: float
    n: int
    phi: np.ndarray
    dx: float = field(init=False)

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        if not self.l > 0:
            raise ValueError(f"l must be positive, got {self.l}")
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"fibre dimension must be a positive integer, got {self.n}")
        if phi.ndim != 1 or phi.size < 5:
            raise ValueError("phi must be a 1-D array with at least 5 samples (m >= 4)")
        if not np.all(np.isfinite(phi)):
            raise ValueError("phi must be finite")
        scale = max(1.0, float(np.max(np.abs(phi))))
        if np.min(phi) < -NONNEG_SLACK * scale:
            raise ValueError(f"phi must be nonnegative, min = {np.min(phi):.3e}")
        object.__setattr__(self, "dx", self.l / (phi.size - 1))

    @property
    def m(self) -> int:
        return self.phi.size - 1

    @property
    def x(self) -> np.ndarray:
        return np.linspace(0.0, self.l, self.m + 1)

    @classmethod
    def from_function(cls, f, l, m, n=1):
        return cls(l, n, f(np.linspace(0.0, l, m + 1)))


@dataclass(frozen=True)
class CurvatureSnapshot:
    a: np.ndarray
    rho: np.ndarray
    tau1: np.ndarray
    ric_n: np.ndarray
    k_mix: np.ndarray
    sc_mix: np.ndarray


@dataclass(frozen=True)
class ResidualReport:
    sup: float
    l2: float
    points: int


def d1(f, h):
    """First derivative along the last axis, 2nd order everywhere."""
    return np.gradient(f, h, axis=-1, edge_order=2)


def d2(f, h):
    """Second derivative along the last axis: 3-point centred stencil inside,
    4-point one-sided second-order stencils at the ends."""
    f = np.asarray(f, dtype=float)
    g = np.empty_like(f)
    g[..., 1:-1] = (f[..., 2:] - 2.0 * f[..., 1:-1] + f[..., :-2]) / h**2
    g[..., 0] = (2.0 * f[..., 0] - 5.0 * f[..., 1] + 4.0 * f[..., 2] - f[..., 3]) / h**2
    g[..., -1] = (2.0 * f[..., -1] - 5.0 * f[..., -2] + 4.0 * f[..., -3] - f[..., -4]) / h**2
    return g


def _check_positive(phi):
    phi = np.atleast_2d(phi)
    bad = np.argwhere(phi[:, 1:-1] <= 0.0)
    if bad.size:
        raise NonPositiveWarping(int(bad[0, 1]) + 1)


def _quotients(phi, h):
    """a and rho; NaN where phi <= POSITIVITY_FLOOR (endpoints only, after
    the interior positivity check)."""
    phi = np.asarray(phi, dtype=float)
    ok = phi > POSITIVITY_FLOOR
    safe = np.where(ok, phi, 1.0)
    a = np.where(ok, -d1(phi, h) / safe, np.nan)
    rho = np.where(ok, -d2(phi, h) / safe, np.nan)
    return a, rho


def curvature_snapshot(metric: WarpedProductMetric) -> CurvatureSnapshot:
    _check_positive(metric.phi)
    a, rho = _quotients(metric.phi, metric.dx)
    n = metric.n
    return CurvatureSnapshot(a=a, rho=rho, tau1=n * a, ric_n=n * rho, k_mix=rho, sc_mix=n * rho)


def _window(x, l, trim):
    """Points at which identities are evaluated: those whose stencils are
    all centred (index 2 .. m-2), optionally restricted to
    [trim*l, (1-trim)*l].  The one-sided end values of a and rho carry
    O(h^2) errors of a different form, and differentiating them once more
    would cost an order at the neighbouring points."""
    if not 0.0 <= trim < 0.5:
        raise ValueError("trim must lie in [0, 0.5)")
    mask = np.zeros(x.size, dtype=bool)
    mask[2:-2] = True
    if trim > 0.0:
        mask &= (x >= trim * l - 1e-12 * l) & (x <= (1.0 - trim) * l + 1e-12 * l)
    return mask


def _report(res):
    res = res[np.isfinite(res)]
    if res.size == 0:
        return ResidualReport(0.0, 0.0, 0)
    return ResidualReport(float(np.max(res)), float(np.sqrt(np.mean(res**2))), int(res.size))


def check_riccati(metric: WarpedProductMetric, trim: float = 0.0) -> ResidualReport:
    """|a_x - (a^2 + rho)| at the points of ``_window`` (optionally inside
    [trim*l, (1-trim)*l]).  Reduced form of nabla_N A = A^2 + T^2 + R_N."""
    _check_positive(metric.phi)
    a, rho = _quotients(metric.phi, metric.dx)
    res = np.abs(d1(a, metric.dx) - (a * a + rho))
    return _report(res[_window(metric.x, metric.l, trim)])


# ---------------------------------------------------------------------------
# evolution identities along trajectories


def _trajectory_fields(traj, t_min):
    times = np.asarray(traj.times, dtype=float)
    phi = np.asarray(traj.values, dtype=float)
    keep = times >= t_min
    times, phi = times[keep], phi[keep]
    if times.size < 3:
        raise InsufficientSnapshots(f"need >= 3 snapshots, got {times.size}")
    dt = np.diff(times)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * max(dt[0], 1e-300):
        raise ValueError("identity checks need uniformly spaced snapshots")
    _check_positive(phi)
    h = traj.l / (phi.shape[1] - 1)
    a, rho = _quotients(phi, h)
    return times, dt[0], h, a, rho


def _time_derivative(f, dt):
    return (f[2:] - f[:-2]) / (2.0 * dt)


@dataclass(frozen=True)
class EvolutionCheck:
    residual: ResidualReport
    lhs_sup: float
    rhs_sup: float


def _finish(lhs, rhs, mask):
    lhs, rhs = lhs[:, mask], rhs[:, mask]
    res = np.abs(lhs - rhs)
    finite = np.isfinite(res)
    return EvolutionCheck(
        _report(res),
        float(np.max(np.abs(lhs[finite]), initial=0.0)),
        float(np.max(np.abs(rhs[finite]), initial=0.0)),
    )


def _a_rhs(a, h):
    return d2(a, h) - 2.0 * a * d1(a, h)


def check_A_evolution(traj, phi_param=None, trim=0.0, t_min=0.0) -> EvolutionCheck:
    """d_t a = a_xx - 2 a a_x (scalar form of d_t A = N(N(A)) - 2 A N(A)).

    The normalisation term 2 Phi ghat only rescales phi by exp(Phi t),
    which leaves a unchanged, so the identity is the same for every Phi;
    ``phi_param`` is accepted for interface symmetry.
    """
    _, dt, h, a, _ = _trajectory_fields(traj, t_min)
    lhs = _time_derivative(a, dt)
    rhs = _a_rhs(a, h)[1:-1]
    return _finish(lhs, rhs, _window(traj.x, traj.l, trim))


@dataclass(frozen=True)
class Tau1Check:
    transport: EvolutionCheck      # d_t tau1 = N(Ric_N), Ric_N = n rho
    heat: EvolutionCheck           # d_t tau1 = N(N(tau1)) - N(tr A^2)
    forms_gap: float               # both forms through one discrete N, see below
    riccati_gap: float             # sup |n rho - (N(tau1) - tr A^2)|
    heat_vs_A_gap: float           # sup |heat rhs - n * (A-identity rhs)|
    magnitude: float               # round-off scale sup(|N(tau1)| + |tr A^2|) / h


def check_tau1_evolution(traj, n=None, trim=0.0, t_min=0.0) -> Tau1Check:
    """Both forms of the mean-curvature evolution with tau1 = n a.

    ``heat`` uses the second-derivative stencil for N(N(tau1)) and
    N(tr A^2) = 2 tr(A N(A)) = 2 n a a_x, so its right side is n times the
    right side of the A-identity.  ``transport`` uses Ric_N = n rho from the
    curvature extraction; it differs from the heat form by N of the
    discrete Riccati residual and converges to it at second order.

    ``forms_gap`` evaluates both right sides with the first-derivative
    stencil as the only discrete N, taking Ric_N from the traced Riccati
    equation (Ric_N = N(tau1) - tr A^2).  The two forms are then the same
    linear combination of the same arrays, so the gap is round-off, at most
    a few eps * ``magnitude`` (a difference stencil turns relative rounding
    errors of its inputs into absolute errors of size eps * |input| / h).
    """
    n = traj.n if n is None else n
    _, dt, h, a, rho = _trajectory_fields(traj, t_min)
    mask = _window(traj.x, traj.l, trim)
    tau1 = n * a
    tr_a2 = n * a * a
    n_tau1 = d1(tau1, h)
    lhs = _time_derivative(tau1, dt)
    rhs_transport = d1(n * rho, h)[1:-1]
    rhs_heat = (d2(tau1, h) - 2.0 * n * a * d1(a, h))[1:-1]
    rhs_a = n * _a_rhs(a, h)[1:-1]
    composed_heat = (d1(n_tau1, h) - d1(tr_a2, h))[1:-1]
    composed_transport = d1(n_tau1 - tr_a2, h)[1:-1]
    gap = np.abs(composed_transport - composed_heat)[:, mask]
    ric_gap = np.abs(n * rho - (n_tau1 - tr_a2))[1:-1][:, mask]
    return Tau1Check(
        transport=_finish(lhs, rhs_transport, mask),
        heat=_finish(lhs, rhs_heat, mask),
        forms_gap=float(np.nanmax(gap, initial=0.0)),
        riccati_gap=float(np.nanmax(ric_gap, initial=0.0)),
        heat_vs_A_gap=float(np.nanmax(np.abs(rhs_heat - rhs_a)[:, mask], initial=0.0)),
        magnitude=float(np.nanmax((np.abs(n_tau1) + np.abs(tr_a2))[1:-1][:, mask], initial=0.0)) / h,
    )


def check_rN_evolution(traj, trim=0.0, t_min=0.0) -> EvolutionCheck:
    """d_t rho = rho_xx - 2 a rho_x (R_N evolution with C = a id, T = 0)."""
    _, dt, h, a, rho = _trajectory_fields(traj, t_min)
    lhs = _time_derivative(rho, dt)
    rhs = (d2(rho, h) - 2.0 * a * d1(rho, h))[1:-1]
    return _finish(lhs, rhs, _window(traj.x, traj.l, trim))


def check_rN_envelope(traj, C_bound: float) -> bool:
    """exp(-2Ct) phi0^2 <= phi(t)^2 <= exp(2Ct) phi0^2 given |rho| <= C.

    Meaningful for unnormalised (Phi = 0) trajectories.  Raises
    BoundHypothesisViolated when |rho| exceeds ``C_bound`` somewhere.
    """
    times = np.asarray(traj.times, dtype=float)
    phi = np.asarray(traj.values, dtype=float)
    _check_positive(phi)
    h = traj.l / (phi.shape[1] - 1)
    _, rho = _quotients(phi, h)
    absrho = np.where(np.isfinite(rho), np.abs(rho), 0.0)
    if np.max(absrho) > C_bound:
        k, i = np.unravel_index(np.argmax(absrho), absrho.shape)
        raise BoundHypothesisViolated(float(times[k]), float(traj.x[i]))
    t = (times - times[0])[:, None]
    sq0 = phi[0] ** 2
    sq = phi**2
    slack = 1e-12 * np.max(sq0)
    lower = np.exp(-2.0 * C_bound * t) * sq0
    upper = np.exp(2.0 * C_bound * t) * sq0
    return bool(np.all(sq >= lower - slack) and np.all(sq <= upper + slack))
