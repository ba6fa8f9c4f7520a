"""Exception types raised by prflow.

Computation failures derive from :class:`PRFError`; malformed inputs and
configuration problems raise :class:`ConfigError`.
"""


class PRFError(Exception):
    """Base class for failures of a numerical operation."""


class ConfigError(ValueError):
    """Invalid parameters or configuration file."""


class NonPositiveWarping(PRFError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"warping function is not positive at interior index {index}")


class InsufficientSnapshots(PRFError):
    pass


class BoundHypothesisViolated(PRFError):
    def __init__(self, t, x):
        self.t = t
        self.x = x
        super().__init__(f"|rho| exceeds the bound at t={t:g}, x={x:g}")


class SingularDenominator(PRFError):
    pass


class InvalidBoundary(PRFError):
    pass


class MissingSolution(PRFError):
    pass


class BoundaryMismatch(PRFError):
    def __init__(self, gap):
        self.gap = gap
        super().__init__(f"initial data disagrees with boundary data by {gap:.3e}")


class NonVanishingEndpoints(PRFError):
    def __init__(self, values):
        self.values = values
        super().__init__(f"samples do not vanish at the endpoints: {values}")


class DivergentAtZero(PRFError):
    pass


class SupercriticalM2(PRFError):
    pass


class NotResonant(PRFError):
    pass


class NonIntegrableBoundary(PRFError):
    pass


class NonNegativeRate(PRFError):
    pass


class TooShort(PRFError):
    pass


class BlowUp(PRFError):
    def __init__(self, t_star):
        self.t_star = t_star
        super().__init__(f"finite-time blow-up at t*={t_star:.12g}")
