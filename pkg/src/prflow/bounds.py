"""Stability estimates for the warping-function flow and their comparison
with computed trajectories.

Notation: delta_j = mu_j - mu_tilde_j are the boundary deviations and

    nu(t) = |Phi| (|delta_0| + |delta_1|) + |delta_0'| + |delta_1'|.

The subcritical estimate bounds sup_x |phi(t, x) - phi_tilde(x)|, the
resonance estimate bounds sup_x |phi(t, x) - phi_inf(x)| where
phi_inf = (v_1^0 + int_0^inf f_1) sin(pi x / l).
"""
from dataclasses import dataclass
from functools import lru_cache
import math

import numpy as np
from scipy.integrate import simpson
from scipy.special import erfcx

from .errors import (DivergentAtZero, NonIntegrableBoundary, NonNegativeRate,
                     NotResonant, SupercriticalM2, TooShort)
from .flow import (BoundaryData, ExponentialApproach, SineSeries, Tabulated,
                   lift_U, sine_coefficients)
from .stationary import critical_phi, is_resonant, stationary_solution

SERIES_RTOL = 1e-15
NU_SAMPLES = 1000
DEFAULT_THETAS = (0.25, 0.5, 0.75)
MARGIN_SLACK = 1e-8


# ---------------------------------------------------------------------------
# nu(t) and its suprema


def _family_nu_terms(fam, phi_param, t):
    return abs(phi_param) * np.abs(fam.delta(t)) + np.abs(fam.ddelta(t))


def nu(bd: BoundaryData, phi_param: float, t):
    """|Phi| (|delta_0| + |delta_1|) + |delta_0'| + |delta_1'| at t."""
    return sum(_family_nu_terms(f, phi_param, t) for f in bd.families)


def sup_nu(bd: BoundaryData, phi_param: float, t0: float, t1: float) -> float:
    """sup of nu over [t0, t1].

    Constant and exponential families give a nonincreasing nu, so the sup
    sits at t0; tabulated data are sampled at NU_SAMPLES points.
    """
    if t1 < t0:
        raise ValueError("empty interval")
    if bd.closed_form:
        return float(nu(bd, phi_param, t0))
    s = np.linspace(t0, t1, NU_SAMPLES)
    return float(np.max(nu(bd, phi_param, s)))


def integral_nu_tail(bd: BoundaryData, phi_param: float, t: float) -> float:
    """int_t^inf nu, closed form for exponential families."""
    total = 0.0
    for fam in bd.families:
        if isinstance(fam, Tabulated):
            raise NonIntegrableBoundary("int_t^inf nu is not available for tabulated data")
        if isinstance(fam, ExponentialApproach):
            d = abs(fam.delta0) * math.exp(-fam.rate * t)
            total += d * (abs(phi_param) + fam.rate) / fam.rate
    return total


# ---------------------------------------------------------------------------
# series constants


@dataclass(frozen=True)
class SeriesConstants:
    M0: float
    M1: float
    M2: float
    truncation_tail: float


@dataclass(frozen=True)
class ResonanceConstants:
    M0: float
    M1: float
    truncation_tail: float


def _gauss_tail(c, J, shift):
    """Upper bound for sum_{j>J} exp(c (shift - j^2)): the first dropped
    term plus the integral over [J + 1, inf), the latter written with erfcx
    to avoid overflow of exp(c shift)."""
    if c <= 0:
        return math.inf
    a = J + 1
    first = math.exp(c * (shift - a * a))
    return first * (1.0 + math.sqrt(math.pi) / (2.0 * math.sqrt(c)) * float(erfcx(math.sqrt(c) * a)))


def _exp_series(k, shift, t, j_start):
    """sum_{j >= j_start} exp(k t (shift - j^2)) for k > 0, t > 0.

    Summed until the next term drops below SERIES_RTOL times the partial
    sum; returns (sum, certified bound on the dropped tail)."""
    c = k * t
    total = 0.0
    j = j_start
    while True:
        term = math.exp(c * (shift - j * j))
        total += term
        nxt = math.exp(c * (shift - (j + 1) ** 2))
        if nxt < SERIES_RTOL * total:
            break
        j += 1
    tail = _gauss_tail(c, j, shift)
    return total, tail


@lru_cache(maxsize=64)
def _m2_sum(phi_param, l):
    """sum_{j>=1} 1/(j ((pi j/l)^2 - Phi)); returns (value, tail bound).

    The terms are summed until they drop below SERIES_RTOL times the partial
    sum; the remainder is estimated by the midpoint integral from J + 1/2,
    which lies between 0 and the certified tail bound."""
    k = (math.pi / l) ** 2
    total = 0.0
    j0 = 1
    chunk = 65536
    while True:
        j = np.arange(j0, j0 + chunk, dtype=float)
        terms = 1.0 / (j * (k * j * j - phi_param))
        total += float(np.sum(terms))
        if terms[-1] < SERIES_RTOL * total:
            break
        j0 += chunk
    J = j0 + chunk - 1
    a2 = k * (J + 0.5) ** 2
    if phi_param == 0.0:
        estimate = 1.0 / (2.0 * a2)
    else:
        # int_a^inf ds / (s (k s^2 - Phi)) = -log(1 - Phi/(k a^2)) / (2 Phi)
        estimate = -math.log1p(-phi_param / a2) / (2.0 * phi_param)
    # sum_{j>J} <= 1/(2 J^2 k (1 - Phi/(k (J+1)^2)))
    bound = 1.0 / (2.0 * J * J * k * (1.0 - max(phi_param, 0.0) / (k * (J + 1) ** 2)))
    return total + estimate, bound


def series_constants(phi_param: float, l: float, t: float, theta: float = 0.5) -> SeriesConstants:
    """M0(t), M1(t) (with the 6/pi factor) and M2 of the subcritical estimate."""
    if t <= 0:
        raise DivergentAtZero(f"series constants need t > 0, got t = {t}")
    _check_theta(theta)
    crit = critical_phi(l)
    if phi_param >= crit:
        raise SupercriticalM2(f"M2 needs Phi < (pi/l)^2 = {crit}, got {phi_param}")
    s0, tail0 = _exp_series(2.0 * crit, 1.0, t, 1)
    s1, tail1 = _exp_series((1.0 - theta) * crit, 1.0, t, 1)
    s2, tail2 = _m2_sum(phi_param, l)
    M0 = math.sqrt(s0)
    # sqrt(s + e) - sqrt(s) <= e / (2 sqrt(s))
    tail = tail0 / (2.0 * M0) + (6.0 / math.pi) * (tail1 + tail2)
    return SeriesConstants(M0, 6.0 / math.pi * s1, 6.0 / math.pi * s2, tail)


def resonance_constants(l: float, t: float, theta: float = 0.5) -> ResonanceConstants:
    """M0~(t) and M1~(t): sums from j = 2 of exp(... (4 - j^2) t)."""
    if t <= 0:
        raise DivergentAtZero(f"series constants need t > 0, got t = {t}")
    _check_theta(theta)
    crit = critical_phi(l)
    s0, tail0 = _exp_series(2.0 * crit, 4.0, t, 2)
    s1, tail1 = _exp_series((1.0 - theta) * crit, 4.0, t, 2)
    M0 = math.sqrt(s0)
    return ResonanceConstants(M0, s1, tail0 / (2.0 * M0) + tail1)


def _check_theta(theta):
    if not 0.0 < theta < 1.0:
        raise ValueError(f"theta must lie in (0, 1), got {theta}")


# ---------------------------------------------------------------------------
# bound reports


@dataclass(frozen=True)
class BoundReport:
    times: np.ndarray
    observed_deviation: np.ndarray
    bound_value: np.ndarray
    theta: float
    margin: np.ndarray
    truncation_tail: float

    def holds(self, slack: float = MARGIN_SLACK, scale: float = 1.0) -> bool:
        return bool(np.all(self.margin >= -slack * scale))

    def rows(self):
        for k in range(self.times.size):
            yield (float(self.times[k]), float(self.observed_deviation[k]),
                   float(self.bound_value[k]), float(self.margin[k]))


def v0_l2_norm(traj, bd: BoundaryData, reference) -> float:
    """||v0||_{L2} with v0 = phi0 - reference - U(0, .), composite Simpson."""
    x = traj.x
    v0 = traj.values[0] - reference(x) - lift_U(bd, 0.0, x, traj.l)
    return math.sqrt(max(float(simpson(v0 * v0, x=x)), 0.0))


def _report_times(traj, t, t_min):
    if t is None:
        sel = traj.times >= t_min
        return np.flatnonzero(sel)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts <= 0):
        raise DivergentAtZero("bounds are only defined for t > 0")
    return np.array([traj.at(s) for s in ts], dtype=int)


def subcritical_bound(traj, bd: BoundaryData = None, phi_param: float = None,
                      theta: float = 0.5, t=None, t_min: float = 0.1,
                      corrected: bool = False) -> BoundReport:
    """Compare sup_x |phi(t) - phi_tilde| with the subcritical estimate.

    ``t`` may be a snapshot time, a list of them, or None for every snapshot
    at or after ``t_min``.  With ``corrected`` the ||v0|| term carries the
    factor sqrt(2/l) = sup|e_j| of the orthonormal sine basis; the literal
    estimate omits it and fails on v0 = sin(pi x / l) by exactly that factor.
    """
    bd = traj.boundary if bd is None else bd
    phi_param = traj.phi_param if phi_param is None else phi_param
    l = traj.l
    _check_theta(theta)
    crit = critical_phi(l)
    if phi_param >= crit:
        raise SupercriticalM2(f"subcritical bound needs Phi < {crit}, got {phi_param}")
    st = stationary_solution(phi_param, l, *bd.mu_tilde)
    idx = _report_times(traj, t, t_min)
    if idx.size and traj.times[idx[0]] <= 0:
        raise DivergentAtZero("bounds are only defined for t > 0")
    pt = st.phi_tilde(traj.x)
    norm_v0 = v0_l2_norm(traj, bd, st.phi_tilde) * (math.sqrt(2.0 / l) if corrected else 1.0)
    gap = crit - phi_param
    times = traj.times[idx]
    observed = np.max(np.abs(traj.values[idx] - pt[None, :]), axis=1)
    bound = np.empty(idx.size)
    tail = 0.0
    for k, s in enumerate(times):
        c = series_constants(phi_param, l, s, theta)
        d0, d1 = bd.delta(s)
        bound[k] = (max(abs(float(d0)), abs(float(d1)))
                    + c.M0 * math.exp(-gap * s) * norm_v0
                    + c.M1 / gap * math.exp(-(1.0 - theta) * gap * s) * sup_nu(bd, phi_param, 0.0, theta * s)
                    + c.M2 * sup_nu(bd, phi_param, theta * s, s))
        tail = max(tail, c.truncation_tail)
    return BoundReport(times, observed, bound, theta, bound - observed, tail)


def _check_resonance_data(bd, l, phi_param=None):
    if phi_param is not None and not is_resonant(phi_param, l):
        raise NotResonant(f"Phi = {phi_param} is not (pi/l)^2 = {critical_phi(l)}")
    for fam in bd.families:
        if isinstance(fam, Tabulated):
            raise NonIntegrableBoundary("tabulated data cannot certify integrability of delta")
        if fam.mu_tilde != 0.0:
            raise NonIntegrableBoundary(
                f"resonance limit needs mu_tilde = 0 at both ends, got {bd.mu_tilde}")


def _f1_integral(bd, l):
    """int_0^inf f_1, f_1 = (2/pi)((pi/l)^2 (delta_0 + delta_1) - delta_0' - delta_1')."""
    k = (math.pi / l) ** 2
    total = 0.0
    for fam in bd.families:
        if isinstance(fam, ExponentialApproach):
            # int delta = delta0 / rate, int delta' = -delta0
            total += k * fam.delta0 / fam.rate + fam.delta0
    return 2.0 / math.pi * total


def limit_profile_resonance(phi0, bd: BoundaryData, l: float = None) -> SineSeries:
    """phi_inf = (v_1^0 + int_0^inf f_1) sin(pi x / l) in the resonance case.

    ``phi0`` is a WarpedProductMetric (or sampled array on [0, l])."""
    phi = np.asarray(getattr(phi0, "phi", phi0), dtype=float)
    l = getattr(phi0, "l", l) if l is None else l
    _check_resonance_data(bd, l)
    x = np.linspace(0.0, l, phi.size)
    v0 = phi - lift_U(bd, 0.0, x, l)
    v0[0] = v0[-1] = 0.0
    v10 = sine_coefficients(v0, l, 1).coeffs[0]
    return SineSeries(l, np.array([v10 + _f1_integral(bd, l)]))


def resonance_bound(traj, bd: BoundaryData = None, theta: float = 0.5, t=None,
                    t_min: float = 0.1, corrected: bool = False) -> BoundReport:
    """Compare sup_x |phi(t) - phi_inf| with the resonance estimate.

    ``corrected`` as for subcritical_bound."""
    bd = traj.boundary if bd is None else bd
    l = traj.l
    _check_theta(theta)
    _check_resonance_data(bd, l, traj.phi_param)
    phi_param = critical_phi(l)
    limit = limit_profile_resonance(traj.values[0], bd, l)
    idx = _report_times(traj, t, t_min)
    if idx.size and traj.times[idx[0]] <= 0:
        raise DivergentAtZero("bounds are only defined for t > 0")
    ref = limit(traj.x)
    norm_v0 = v0_l2_norm(traj, bd, lambda x: np.zeros_like(x)) * (math.sqrt(2.0 / l) if corrected else 1.0)
    times = traj.times[idx]
    observed = np.max(np.abs(traj.values[idx] - ref[None, :]), axis=1)
    bound = np.empty(idx.size)
    tail = 0.0
    for k, s in enumerate(times):
        c = resonance_constants(l, s, theta)
        d0, d1 = bd.delta(s)
        bound[k] = (6.0 / math.pi * integral_nu_tail(bd, phi_param, s)
                    + max(abs(float(d0)), abs(float(d1)))
                    + c.M0 * math.exp(-3.0 * phi_param * s) * norm_v0
                    + c.M1 * 2.0 * l**2 / math.pi**3 * math.exp(-3.0 * (1.0 - theta) * phi_param * s)
                    * sup_nu(bd, phi_param, 0.0, theta * s)
                    + 3.0 * l**2 / (2.0 * math.pi**3) * sup_nu(bd, phi_param, theta * s, s))
        tail = max(tail, c.truncation_tail)
    return BoundReport(times, observed, bound, theta, bound - observed, tail)


# ---------------------------------------------------------------------------
# scalar ODE envelope


def ode_envelope(a: float, y0: float, nu_sup_left: float, nu_sup_right: float,
                 t: float, theta: float = 0.5):
    """|y0| e^{a t} + |a|^-1 e^{(1-theta) a t} sup_[0, theta t]|nu|
    + |a|^-1 sup_[theta t, t]|nu|  for y' = alpha(t) y + nu, alpha <= a < 0.

    ``t`` and the two suprema may be arrays of matching shape."""
    if not a < 0:
        raise NonNegativeRate(f"envelope needs a < 0, got {a}")
    _check_theta(theta)
    t = np.asarray(t, dtype=float)
    inv = 1.0 / abs(a)
    return (abs(y0) * np.exp(a * t) + inv * np.exp((1.0 - theta) * a * t) * np.abs(nu_sup_left)
            + inv * np.abs(nu_sup_right))


# ---------------------------------------------------------------------------
# divergence


@dataclass(frozen=True)
class DivergenceFit:
    rate: float
    slope: float
    kind: str                      # "Exponential", "Linear" or "None"
    r2_exponential: float
    r2_linear: float


def _r2(y, fit):
    ss = float(np.sum((y - y.mean()) ** 2))
    if ss == 0.0:
        return 1.0
    return 1.0 - float(np.sum((y - fit) ** 2)) / ss


def first_sine_coefficients(traj) -> np.ndarray:
    """First sine coefficient of phi(t) minus the linear interpolant of its
    boundary values, for every snapshot."""
    x = traj.x
    s = x / traj.l
    w = traj.values - (np.outer(traj.values[:, 0], 1.0 - s) + np.outer(traj.values[:, -1], s))
    w[:, 0] = w[:, -1] = 0.0
    basis = np.sin(np.pi * s)
    return (2.0 / traj.l) * simpson(w * basis[None, :], x=x, axis=-1)


def divergence_rate(traj, transient: float = 0.2, min_snapshots: int = 20,
                    growth: float = 1.2) -> DivergenceFit:
    """Classify long-time behaviour of a trajectory.

    After dropping the first ``transient`` fraction of the time span, fits
    log sup|phi| (exponential growth, rate) and the first sine coefficient
    (linear growth, slope) against t and keeps the better fit by R^2.  A
    sup-norm that grows by less than ``growth`` over the window is
    classified as bounded.
    """
    times = np.asarray(traj.times, dtype=float)
    start = times[0] + transient * (times[-1] - times[0])
    sel = times >= start
    if sel.sum() < min_snapshots:
        raise TooShort(f"need >= {min_snapshots} snapshots after the transient, got {int(sel.sum())}")
    t = times[sel]
    sup = np.max(np.abs(traj.values[sel]), axis=1)
    c1 = first_sine_coefficients(traj)[sel]
    rate, b = np.polyfit(t, np.log(sup), 1)
    slope, b1 = np.polyfit(t, c1, 1)
    r2e = _r2(np.log(sup), rate * t + b)
    r2l = _r2(c1, slope * t + b1)
    if sup[-1] <= growth * sup[0]:
        kind = "None"
    else:
        kind = "Exponential" if r2e >= r2l else "Linear"
    return DivergenceFit(float(rate), float(slope), kind, r2e, r2l)


@dataclass(frozen=True)
class ResonanceDrift:
    quadrature: float      # (2/l) int_0^l (pi/l)^2 U0(s) sin(pi s/l) ds
    printed: float         # (2 n pi^2 / l^3)(mu0 + mu1) int_0^l s sin(pi s/l) ds
    ratio: float           # printed / quadrature (= n l)


def resonance_drift(mu0: float, mu1: float, l: float, n: int = 1, m: int = 2000) -> ResonanceDrift:
    """Growth rate of v_1 for frozen boundary values in the resonance case.

    Here phi_tilde = 0, U0(s) = mu0 (l - s)/l + mu1 s/l and f = (pi/l)^2 U0
    is constant in time, so v_1(t) = v_1^0 + f_1 t.
    """
    s = np.linspace(0.0, l, m + 1)
    u0 = mu0 * (l - s) / l + mu1 * s / l
    k = (math.pi / l) ** 2
    quad = 2.0 / l * float(simpson(k * u0 * np.sin(math.pi * s / l), x=s))
    moment = float(simpson(s * np.sin(math.pi * s / l), x=s))
    printed = 2.0 * n * math.pi**2 / l**3 * (mu0 + mu1) * moment
    return ResonanceDrift(quad, printed, printed / quad if quad else math.nan)
