"""Stationary warping functions: solutions of phi'' + Phi*phi = 0 on [0, l]
with phi(0) = mu0, phi(l) = mu1.
"""
from dataclasses import dataclass
from enum import Enum
import math
from typing import Callable, Optional

import numpy as np

from .errors import InvalidBoundary, MissingSolution, SingularDenominator

RESONANCE_RTOL = 1e-12
SINGULAR_TOL = 1e-12


class Regime(str, Enum):
    SUBCRITICAL_TRIG = "SubcriticalTrig"
    ZERO = "Zero"
    NEGATIVE = "Negative"
    RESONANCE_FAMILY = "ResonanceFamily"
    RESONANCE_UNSOLVABLE = "ResonanceUnsolvable"
    SUPERCRITICAL = "Supercritical"


def critical_phi(l: float) -> float:
    """(pi/l)^2, the first Dirichlet eigenvalue of -d^2/dx^2 on [0, l]."""
    return (math.pi / l) ** 2


def is_resonant(phi_param: float, l: float) -> bool:
    crit = critical_phi(l)
    return abs(phi_param - crit) <= RESONANCE_RTOL * crit


def sinpi(s):
    """sin(pi*s) for s in [0, 1], exactly zero at both ends."""
    s = np.asarray(s, dtype=float)
    return np.sin(np.pi * np.minimum(s, 1.0 - s))


def _pin_ends(x, y, l, mu0, mu1):
    # the quotient sin(k l)/sin(k l) need not round to exactly 1
    return np.where(x == 0.0, mu0, np.where(x == l, mu1, y))


@dataclass(frozen=True)
class StationaryResult:
    regime: Regime
    phi_param: float
    l: float
    mu0: float
    mu1: float
    phi_tilde: Optional[Callable[[np.ndarray], np.ndarray]]
    family_param: Optional[float]
    stable_under_flow: bool

    def sample(self, m: int) -> np.ndarray:
        """phi_tilde on the uniform grid with m intervals."""
        if self.phi_tilde is None:
            raise MissingSolution(f"no stationary solution in regime {self.regime.value}")
        return self.phi_tilde(np.linspace(0.0, self.l, m + 1))


def stationary_solution(phi_param, l, mu0, mu1, family_C=None) -> StationaryResult:
    """Closed-form stationary warping function for constant Phi.

    Supercritical Phi (above (pi/l)^2, away from higher resonances) returns
    the formal trigonometric solution flagged ``stable_under_flow=False``.
    In the resonance case the family C sin(pi x/l) + mu0 cos(pi x/l) is
    returned when mu1 = -mu0; ``family_C`` defaults to 0.
    """
    if not l > 0:
        raise InvalidBoundary(f"interval length must be positive, got {l}")
    if mu0 < 0 or mu1 < 0:
        raise InvalidBoundary(f"boundary values must be >= 0, got ({mu0}, {mu1})")
    phi_param = float(phi_param)
    crit = critical_phi(l)
    stable = phi_param < crit and not is_resonant(phi_param, l)

    def make(regime, fn, C=None, stable_flag=stable):
        return StationaryResult(regime, phi_param, l, mu0, mu1, fn, C, stable_flag)

    if phi_param == 0.0:
        def linear(x):
            s = np.asarray(x, dtype=float) / l
            return (1.0 - s) * mu0 + s * mu1
        return make(Regime.ZERO, linear)

    if phi_param < 0.0:
        k = math.sqrt(-phi_param)
        denom = math.sinh(k * l)

        def hyperbolic(x):
            x = np.asarray(x, dtype=float)
            y = mu1 * (np.sinh(k * x) / denom) + mu0 * (np.sinh(k * (l - x)) / denom)
            return _pin_ends(x, y, l, mu0, mu1)
        return make(Regime.NEGATIVE, hyperbolic)

    if is_resonant(phi_param, l):
        if abs(mu1 + mu0) <= RESONANCE_RTOL * max(1.0, mu0):
            C = 0.0 if family_C is None else float(family_C)

            def family(x):
                s = np.asarray(x, dtype=float) / l
                return C * sinpi(s) + mu0 * np.cos(np.pi * s)
            return make(Regime.RESONANCE_FAMILY, family, C)
        return make(Regime.RESONANCE_UNSOLVABLE, None)

    k = math.sqrt(phi_param)
    denom = math.sin(k * l)
    # small k l is regular (sin(kx)/sin(kl) -> x/l); only k l near j pi, j >= 1, is singular
    j = round(k * l / math.pi)
    if j >= 1 and abs(denom) < SINGULAR_TOL:
        raise SingularDenominator(
            f"sin(sqrt(Phi) l) = {denom:.3e}: Phi={phi_param} is at or near a higher resonance")

    def trig(x):
        x = np.asarray(x, dtype=float)
        y = mu1 * (np.sin(k * x) / denom) + mu0 * (np.sin(k * (l - x)) / denom)
        return _pin_ends(x, y, l, mu0, mu1)

    regime = Regime.SUBCRITICAL_TRIG if phi_param < crit else Regime.SUPERCRITICAL
    return make(regime, trig)


def stationary_residual(result: StationaryResult, phi_param: float, m: int) -> float:
    """Max of |phi'' + Phi phi| at interior grid points (3-point stencil),
    combined with the endpoint errors |phi(0) - mu0| and |phi(l) - mu1|."""
    if result.phi_tilde is None:
        raise MissingSolution(f"no stationary solution in regime {result.regime.value}")
    h = result.l / m
    f = result.sample(m)
    interior = np.abs((f[2:] - 2.0 * f[1:-1] + f[:-2]) / h**2 + phi_param * f[1:-1])
    ends = max(abs(f[0] - result.mu0), abs(f[-1] - result.mu1))
    return float(max(interior.max(initial=0.0), ends))
