"""Conditional dynamics under double-homodyne (eight-port) detection.

The cavity output is mixed with an auxiliary field (bath 2) and two commuting
quadratures are recorded.  Their innovations ``dY~1, dY~2`` are correlated
Wiener increments with covariance ``noise_cov(bath1, bath2) dt``.  The
conditional state stays Gaussian; for a coherent (or vacuum) input the
covariance equation is a homogeneous Riccati equation with an explicit
solution, see :func:`closed_form_coherent`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DegenerateDenominator, DetunedSystem
from .gaussian import BathSpec, GaussianMoments, ModelParams, check_physical, delta_det
from .numerics import NoiseCov2, cholesky2
from .single import RiccatiSystem, _propagate_mean, integrate_covariance
from .trajectory import TrajectoryRecord, check_step, n_steps, substream, time_grid

__all__ = [
    "DoubleHomodyneConfig",
    "noise_cov",
    "double_rhs",
    "double_gains",
    "mean_step_double",
    "build_riccati_coherent",
    "closed_form_coherent",
    "simulate_trajectory_double",
    "simulate_batch_double",
    "stationary_state_double",
]

DEGENERATE_TOL = 1e-12


@dataclass(frozen=True)
class DoubleHomodyneConfig:
    bath1: BathSpec
    bath2: BathSpec
    params: ModelParams
    init: GaussianMoments
    t_final: float
    dt: Optional[float] = None
    seed: int = 0

    def __post_init__(self):
        if self.dt is None:
            object.__setattr__(self, "dt", 1e-3 / self.params.mu)
        check_step(self.t_final, self.dt, self.params.mu)
        check_physical(self.init.zeta, self.init.nu)


def noise_cov(bath1: BathSpec, bath2: BathSpec) -> NoiseCov2:
    """Covariance rates of the two recorded increments ``dY1, dY2``.

    ``c11 = 1 + n1 + n2 + Re(m1 + m2)``, ``c22 = 1 + n1 + n2 - Re(m1 + m2)``
    and ``c12 = Im(m1 - m2)``.  The determinant is ``delta_det(bath1, bath2)``.
    """
    s = 1.0 + bath1.n + bath2.n
    p = bath1.m.real + bath2.m.real
    return NoiseCov2(s + p, bath1.m.imag - bath2.m.imag, s - p)


def double_rhs(zeta, nu, bath1: BathSpec, bath2: BathSpec, params: ModelParams):
    """``(dzeta/dt, dnu/dt)`` for the double-homodyne conditional covariance.

    The linear relaxation of ``zeta`` is ``-mu (zeta - m1)``, the sign that
    makes ``zeta = m1`` an attractor and agrees with the homogeneous Riccati
    form for coherent input.
    """
    mu, delta = params.mu, params.delta
    d = delta_det(bath1, bath2)
    s = 1.0 + bath1.n + bath2.n
    p = bath1.m.real + bath2.m.real
    q = bath1.m.imag - bath2.m.imag
    z = zeta - bath1.m
    v = nu - bath1.n
    c = mu / d
    dzeta = (
        -2j * delta * zeta - mu * z
        + c * (-2 * s * z * v + p * (z * z + v * v) - 1j * q * (z * z - v * v))
    )
    dnu = -mu * v + c * (
        -s * (abs(z) ** 2 + v * v) + 2 * p * v * z.real + 2 * q * v * z.imag
    )
    return dzeta, dnu


def double_gains(zeta, nu, bath1: BathSpec, bath2: BathSpec, params: ModelParams):
    """Coefficients ``(g1, g2)`` of ``dY~1`` and ``dY~2`` in ``d<a>``."""
    cov = noise_cov(bath1, bath2)
    pref = math.sqrt(params.mu) / (math.sqrt(2.0) * cov.det)
    plus = (zeta - bath1.m) + (nu - bath1.n)
    minus = (zeta - bath1.m) - (nu - bath1.n)
    g1 = pref * (cov.c22 * plus + 1j * cov.c12 * minus)
    g2 = pref * (-cov.c12 * plus - 1j * cov.c11 * minus)
    return g1, g2


def mean_step_double(state: GaussianMoments, bath1: BathSpec, bath2: BathSpec,
                     params: ModelParams, dy, dt: float) -> complex:
    """Euler-Maruyama increment of ``<a>`` for innovations ``dy = (dY~1, dY~2)``."""
    drift = (-(1j * params.delta + 0.5 * params.mu) * state.alpha
             - math.sqrt(params.mu) * bath1.beta)
    g1, g2 = double_gains(state.zeta, state.nu, bath1, bath2, params)
    return drift * dt + g1 * dy[0] + g2 * dy[1]


def build_riccati_coherent(bath2: BathSpec, params: ModelParams) -> RiccatiSystem:
    """Homogeneous Riccati coefficients (``W = 0``) for a coherent bath 1."""
    mu, delta = params.mu, params.delta
    d = delta_det(BathSpec(), bath2)
    n2, m2 = bath2.n, bath2.m
    T = (mu / d) * np.array([[-(1 + n2), m2.conjugate()], [m2, -(1 + n2)]])
    R = np.diag([-mu / 2 - 1j * delta, -mu / 2 + 1j * delta])
    return RiccatiSystem(T.astype(complex), R.astype(complex), np.zeros((2, 2), complex))


def closed_form_coherent(z0, bath2: BathSpec, params: ModelParams, t):
    """Exact ``(zeta(t), nu(t))`` for coherent or vacuum input in field 1.

    Parameters
    ----------
    z0 : tuple
        Initial ``(zeta0, nu0)``.
    bath2 : BathSpec
        Auxiliary field.
    params : ModelParams
    t : float or array_like
        Evaluation time(s).

    Raises
    ------
    DegenerateDenominator
        If the common denominator ``D(t)`` has modulus below 1e-12.
    """
    zeta0, nu0 = complex(z0[0]), float(z0[1])
    mu, delta = params.mu, params.delta
    n2, m2 = bath2.n, bath2.m
    d = (1 + n2) ** 2 - abs(m2) ** 2
    t = np.asarray(t, dtype=float)
    det0 = nu0 * nu0 - abs(zeta0) ** 2

    e_mu = 1 - np.exp(-mu * t)
    e_minus = 1 - np.exp(-(mu - 2j * delta) * t)
    e_plus = 1 - np.exp(-(mu + 2j * delta) * t)
    big_d = (
        1
        + (1 + n2) ** 2 * det0 / d ** 2 * e_mu ** 2
        + 2 * nu0 * (1 + n2) / d * e_mu
        - mu * m2.conjugate() * zeta0.conjugate() / (d * (mu - 2j * delta)) * e_minus
        - mu * m2 * zeta0 / (d * (mu + 2j * delta)) * e_plus
        - mu ** 2 * abs(m2) ** 2 * det0 / (d ** 2 * (mu ** 2 + 4 * delta ** 2)) * e_minus * e_plus
    )
    if np.any(np.abs(big_d) < DEGENERATE_TOL):
        raise DegenerateDenominator(f"|D(t)| < {DEGENERATE_TOL} for zeta0={zeta0}, nu0={nu0}")
    zeta = np.exp(-(mu + 2j * delta) * t) / big_d * (
        zeta0 + mu * m2.conjugate() * det0 / (d * (mu - 2j * delta)) * e_minus
    )
    nu = np.exp(-mu * t) / big_d * (nu0 + (1 + n2) * det0 / d * e_mu)
    if t.ndim == 0:
        return complex(zeta), float(nu.real)
    return zeta, nu.real


def _covariances(cfg: DoubleHomodyneConfig, steps: int):
    zeta, nu = integrate_covariance(
        lambda z, v: double_rhs(z, v, cfg.bath1, cfg.bath2, cfg.params),
        cfg.init.zeta, cfg.init.nu, cfg.dt, steps,
    )
    check_physical(zeta, nu, time_grid(cfg.t_final, cfg.dt))
    return zeta, nu


def draw_innovations(cov: NoiseCov2, dt: float, seed: int, index: int, steps: int):
    """Correlated innovations ``(steps, 2)`` with covariance ``cov dt``."""
    chol = cholesky2(cov)
    z = substream(seed, index).standard_normal((steps, 2))
    return math.sqrt(dt) * z @ chol.T


def simulate_batch_double(cfg: DoubleHomodyneConfig, indices: Sequence[int],
                          covariances=None) -> list[TrajectoryRecord]:
    """Batch counterpart of :func:`simulate_trajectory_double`; see ``single.simulate_batch``."""
    b1, b2, params, dt = cfg.bath1, cfg.bath2, cfg.params, cfg.dt
    mu = params.mu
    steps = n_steps(cfg.t_final, dt)
    t = time_grid(cfg.t_final, dt)
    zeta, nu = covariances if covariances is not None else _covariances(cfg, steps)
    cov = noise_cov(b1, b2)

    dy = np.stack([draw_innovations(cov, dt, cfg.seed, i, steps) for i in indices])
    g1, g2 = double_gains(zeta[:-1], nu[:-1], b1, b2, params)
    # Fold both channels into one complex "innovation" with unit gain per step.
    combined = g1 * dy[:, :, 0] + g2 * dy[:, :, 1]
    alpha = _propagate_mean(
        cfg.init.alpha,
        -(1j * params.delta + 0.5 * mu) * dt,
        -math.sqrt(mu) * b1.beta * dt,
        np.ones(steps), combined,
    )
    a = alpha[:, :-1]
    out = np.empty_like(dy)
    out[:, :, 0] = dy[:, :, 0] + (math.sqrt(2 * mu) * a.real
                                  + math.sqrt(2) * (b1.beta.real + b2.beta.real)) * dt
    out[:, :, 1] = dy[:, :, 1] + (math.sqrt(2 * mu) * a.imag
                                  + math.sqrt(2) * (b1.beta.imag - b2.beta.imag)) * dt

    zero = np.zeros((1, 2))
    return [
        TrajectoryRecord(
            "double-homodyne", t, alpha[row], zeta, nu,
            np.concatenate([zero, dy[row]]), np.concatenate([zero, out[row]]),
            cfg.seed, int(i),
        )
        for row, i in enumerate(indices)
    ]


def simulate_trajectory_double(cfg: DoubleHomodyneConfig, index: int = 0) -> TrajectoryRecord:
    """One conditional trajectory under double-homodyne detection.

    Covariances by RK4 on :func:`double_rhs`; the mean by Euler-Maruyama with
    innovations ``cholesky2(noise_cov) sqrt(dt) (N(0,1), N(0,1))``.  The
    reconstructed photocurrents are
    ``dY1 = dY~1 + sqrt(2 mu) Re<a> dt + sqrt(2) Re(beta1 + beta2) dt`` and
    ``dY2 = dY~2 + sqrt(2 mu) Im<a> dt + sqrt(2) Im(beta1 - beta2) dt``.
    Bath 2's drive only shifts these records; it never enters the state.
    """
    return simulate_batch_double(cfg, [index])[0]


def stationary_state_double(bath1: BathSpec, params: ModelParams) -> GaussianMoments:
    """Long-time conditional state: ``(-2 beta1 / sqrt(mu), m1, n1)`` at resonance.

    For coherent input the covariance decays to zero at any detuning and the
    mean relaxes to ``-sqrt(mu) beta1 / (i delta + mu/2)``.
    """
    mu = params.mu
    if params.delta == 0:
        return GaussianMoments(-2 * bath1.beta / math.sqrt(mu), bath1.m, bath1.n)
    if bath1.is_coherent:
        return GaussianMoments(-math.sqrt(mu) * bath1.beta / (1j * params.delta + 0.5 * mu), 0j, 0.0)
    raise DetunedSystem(
        f"no closed-form double-homodyne stationary state for delta={params.delta!r} "
        f"with a non-coherent field 1"
    )

