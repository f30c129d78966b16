"""Gaussian states of a single cavity mode and Gaussian input fields.

A Gaussian state of the mode is described by three numbers: the mean
amplitude ``alpha = <a>``, the squeezing parameter ``zeta = <a^2> - alpha^2``
and the symmetric excitation ``nu = <a^dag a> - |alpha|^2``.  Its normally
ordered characteristic function is::

    chi(xi) = exp[-i(conj(xi) alpha + xi conj(alpha))
                  - (conj(xi)^2 zeta + xi^2 conj(zeta)) / 2 - |xi|^2 nu]

An input field (bath) is described by its mean excitation ``n``, squeezing
correlation ``m`` and coherent drive ``beta``, with the Ito table
``dB dB = m dt``, ``dB^dag dB = n dt``, ``dB dB^dag = (n + 1) dt``.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigError, NonPhysicalBath, PhysicalityViolation

logger = logging.getLogger(__name__)

BATH_TOL = 1e-12
PHYSICALITY_ABORT_TOL = 1e-6

__all__ = [
    "BathSpec",
    "ModelParams",
    "GaussianMoments",
    "validate_bath",
    "kappa",
    "delta_det",
    "moments",
    "dispersions",
    "char_fn",
    "is_pure_field",
    "pure_squeezed_bath",
    "physicality_gap",
    "check_physical",
]


def validate_bath(b: BathSpec) -> BathSpec:
    """Return ``b`` unchanged if ``n >= 0`` and ``|m|^2 <= n(n+1)``.

    The second inequality is checked with an absolute slack of ``1e-12`` so
    that pure squeezed fields, which sit exactly on the boundary, pass after
    floating point rounding.

    Raises
    ------
    NonPhysicalBath
        If either constraint is violated.
    """
    n, m = b.n, b.m
    if not (math.isfinite(n) and cmath.isfinite(m) and cmath.isfinite(b.beta)):
        raise NonPhysicalBath(n, m, f"non-finite bath parameters: {b!r}")
    if n < 0 or abs(m) ** 2 > n * (n + 1) + BATH_TOL:
        raise NonPhysicalBath(n, m)
    return b


@dataclass(frozen=True)
class BathSpec:
    """Gaussian statistics of one input field.

    Parameters
    ----------
    n : float
        Mean excitation number, ``n >= 0``.
    m : complex
        Squeezing correlation, ``|m|^2 <= n(n+1)``.
    beta : complex
        Coherent drive rate, in units of 1/sqrt(time).
    """

    n: float = 0.0
    m: complex = 0j
    beta: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "n", float(self.n))
        object.__setattr__(self, "m", complex(self.m))
        object.__setattr__(self, "beta", complex(self.beta))
        validate_bath(self)

    @classmethod
    def vacuum(cls) -> BathSpec:
        return cls()

    @classmethod
    def thermal(cls, n: float) -> BathSpec:
        return cls(n=n)

    @property
    def is_coherent(self) -> bool:
        """True for vacuum or coherent fields (``n = m = 0``)."""
        return self.n == 0.0 and self.m == 0j


def pure_squeezed_bath(n: float, phase: float = 0.0, beta: complex = 0j) -> BathSpec:
    """Bath on the purity boundary ``|m|^2 = n(n+1)`` with ``arg m = phase``."""
    return BathSpec(n=n, m=math.sqrt(n * (n + 1)) * cmath.exp(1j * phase), beta=beta)


@dataclass(frozen=True)
class ModelParams:
    """Cavity and coupling constants.

    ``delta`` is the detuning between cavity and field carrier, ``mu`` the
    coupling rate (the coupling operator is ``sqrt(mu) a``) and ``theta`` the
    local oscillator phase of the single homodyne scheme, stored mod 2 pi.
    """

    delta: float = 0.0
    mu: float = 1.0
    theta: float = 0.0

    def __post_init__(self):
        delta, mu, theta = float(self.delta), float(self.mu), float(self.theta)
        if not all(math.isfinite(x) for x in (delta, mu, theta)):
            raise ConfigError(f"non-finite model parameters: {self!r}")
        if mu <= 0:
            raise ConfigError(f"coupling rate mu must be positive, got {mu!r}")
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "theta", theta % (2 * math.pi))

    @cached_property
    def phase(self) -> complex:
        """``exp(i theta)``."""
        return cmath.exp(1j * self.theta)


@dataclass(frozen=True)
class GaussianMoments:
    alpha: complex = 0j
    zeta: complex = 0j
    nu: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "zeta", complex(self.zeta))
        object.__setattr__(self, "nu", float(self.nu))

    @classmethod
    def from_moments(cls, mean: complex, a_sq: complex, num: float) -> GaussianMoments:
        """Build from raw moments ``<a>``, ``<a^2>`` and ``<a^dag a>``."""
        mean = complex(mean)
        return cls(mean, a_sq - mean * mean, num - abs(mean) ** 2)

    @classmethod
    def coherent(cls, alpha: complex) -> GaussianMoments:
        return cls(alpha, 0j, 0.0)

    @classmethod
    def thermal(cls, nbar: float) -> GaussianMoments:
        return cls(0j, 0j, nbar)

    @classmethod
    def squeezed(cls, r: float, phase: float = 0.0, alpha: complex = 0j,
                 nbar: float = 0.0) -> GaussianMoments:
        """Displaced squeezed thermal state ``D(alpha) S(r e^{i phase}) rho_th``.

        With ``S(xi) = exp((conj(xi) a^2 - xi a^dag^2) / 2)`` this gives
        ``zeta = -e^{i phase} (2 nbar + 1) sinh(2r) / 2`` and
        ``nu = nbar cosh(2r) + sinh(r)^2``.
        """
        zeta = -cmath.exp(1j * phase) * (2 * nbar + 1) * math.sinh(2 * r) / 2
        nu = nbar * math.cosh(2 * r) + math.sinh(r) ** 2
        return cls(alpha, zeta, nu)


def kappa(b: BathSpec, theta: float) -> float:
    """Variance rate of the single-homodyne innovation, ``1 + 2n + 2 Re(e^{2i theta} m)``.

    Strictly positive for a physical bath because ``|m| < n + 1/2``.
    """
    return 1.0 + 2.0 * b.n + 2.0 * (cmath.exp(2j * theta) * b.m).real


def delta_det(b1: BathSpec, b2: BathSpec) -> float:
    """Determinant of the two-channel double-homodyne noise covariance."""
    s = 1.0 + b1.n + b2.n
    p = b1.m.real + b2.m.real
    q = b1.m.imag - b2.m.imag
    return s * s - p * p - q * q


def moments(g: GaussianMoments) -> tuple[complex, complex, float]:
    """Raw moments ``(<a>, <a^2>, <a^dag a>)`` of a Gaussian state."""
    return g.alpha, g.zeta + g.alpha * g.alpha, g.nu + abs(g.alpha) ** 2


def dispersions(g: GaussianMoments) -> tuple[float, float]:
    """Variances of ``X = a + a^dag`` and ``P = (a - a^dag)/i``."""
    return 1.0 + 2.0 * g.nu + 2.0 * g.zeta.real, 1.0 + 2.0 * g.nu - 2.0 * g.zeta.real


def char_fn(g: GaussianMoments, xi: complex) -> complex:
    """Normally ordered characteristic function ``Tr(e^{-i conj(xi) a} rho e^{-i xi a^dag})``."""
    xi = complex(xi)
    xc = xi.conjugate()
    exponent = (
        -1j * (xc * g.alpha + xi * g.alpha.conjugate())
        - 0.5 * (xc * xc * g.zeta + xi * xi * g.zeta.conjugate())
        - abs(xi) ** 2 * g.nu
    )
    return cmath.exp(exponent)


def is_pure_field(b: BathSpec, tol: float = BATH_TOL) -> bool:
    return abs(b.n * (b.n + 1) - abs(b.m) ** 2) <= tol


def physicality_gap(zeta, nu):
    """``nu(nu+1) - |zeta|^2``; non-negative for a physical Gaussian state.

    Works elementwise on arrays.
    """
    return nu * (nu + 1) - abs(zeta) ** 2


def check_physical(zeta, nu, t=None, tol: float = BATH_TOL,
                   abort_tol: float = PHYSICALITY_ABORT_TOL) -> float:
    """Monitor ``nu(nu+1) >= |zeta|^2`` along an integration.

    Violations larger than ``tol`` are logged; larger than ``abort_tol``
    raise :class:`PhysicalityViolation`.  Returns the smallest gap seen.
    """
    gap = np.asarray(physicality_gap(zeta, nu), dtype=float)
    worst = float(gap.min()) if gap.size else 0.0
    if worst < -abort_tol:
        idx = int(np.argmin(gap))
        when = "" if t is None else f" at t={np.asarray(t).ravel()[idx]!r}"
        raise PhysicalityViolation(
            f"nu(nu+1) - |zeta|^2 = {worst:.3e}{when}: covariance left the "
            f"physical region"
        )
    if worst < -tol:
        logger.warning("physicality monitor: nu(nu+1) - |zeta|^2 = %.3e", worst)
    return worst
