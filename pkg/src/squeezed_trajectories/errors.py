"""Exception hierarchy.

Every error raised by the library derives from :class:`SimulationError`, so a
caller (the CLI in particular) can separate configuration problems from
integration problems with two ``except`` clauses.
"""


class SimulationError(Exception):
    """Base class for all library errors."""


class ConfigError(SimulationError):
    """Invalid user input: configuration text, bath or model parameters."""


class NonPhysicalBath(ConfigError):
    def __init__(self, n, m, message=None):
        self.n = n
        self.m = m
        if message is None:
            message = (
                f"non-physical bath: n={n!r}, m={m!r} "
                f"(need n >= 0 and |m|^2 <= n(n+1); |m|^2={abs(m) ** 2!r}, "
                f"n(n+1)={n * (n + 1)!r})"
            )
        super().__init__(message)


class ParseError(ConfigError):
    def __init__(self, line: int, message: str):
        self.line = line
        super().__init__(f"line {line}: {message}")


class UnknownKey(ConfigError):
    def __init__(self, key: str, line=None, scheme=None):
        self.key = key
        self.line = line
        where = f"line {line}: " if line is not None else ""
        ctx = f" for scheme {scheme!r}" if scheme else ""
        super().__init__(f"{where}unknown key {key!r}{ctx}")


class MissingKey(ConfigError):
    def __init__(self, key: str, scheme=None):
        self.key = key
        ctx = f" (required by scheme {scheme!r})" if scheme else ""
        super().__init__(f"missing key {key!r}{ctx}")


class DetunedSystem(ConfigError):
    """A closed form that only exists at resonance was requested with delta != 0."""


class NotPositiveDefinite(SimulationError):
    pass


class IntegrationError(SimulationError):
    """Base for failures that happen while stepping an equation forward."""


class IntegrationDiverged(IntegrationError):
    pass


class PhysicalityViolation(IntegrationError):
    """Covariance parameters left the physical region nu(nu+1) >= |zeta|^2."""


class MatrixExpOverflow(IntegrationError):
    pass


class SingularDenominator(IntegrationError):
    def __init__(self, t, det, cond):
        self.t = t
        self.det = det
        self.cond = cond
        super().__init__(
            f"matrix-fraction denominator is singular at t={t!r}: "
            f"|det Z2|={abs(det):.3e}, cond(Z2)={cond:.3e}"
        )


class DegenerateDenominator(IntegrationError):
    pass


class TruncationLeak(IntegrationError):
    def __init__(self, population, dim):
        self.population = population
        self.dim = dim
        super().__init__(
            f"population {population:.3e} in the top two Fock levels of a "
            f"dimension-{dim} truncation exceeds 1e-6; increase fock_dim"
        )


class GridMismatch(SimulationError):
    pass
