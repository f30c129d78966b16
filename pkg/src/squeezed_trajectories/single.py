"""Conditional dynamics of the cavity mode under single-homodyne detection.

The measured signal is the theta-quadrature of the output field.  A Gaussian
initial state stays Gaussian; its mean is driven by the innovation ``dY~``
(a Wiener process of rate ``kappa``) while ``zeta`` and ``nu`` follow a
deterministic matrix Riccati equation::

    dZ/dt = Z T Z + R Z + Z R^dag + W,     Z = [[nu, zeta], [conj(zeta), nu]]

which is solved in closed form through the matrix fraction ``Z = Z1 Z2^{-1}``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import DetunedSystem, IntegrationDiverged, SingularDenominator
from .gaussian import BathSpec, GaussianMoments, ModelParams, check_physical, kappa
from .numerics import as_cmat, mat_exp
from .trajectory import TrajectoryRecord, check_step, n_steps, substream, time_grid

__all__ = [
    "SingleHomodyneConfig",
    "RiccatiSystem",
    "drift_gain",
    "riccati_rhs",
    "build_riccati",
    "riccati_matrix_rhs",
    "covariance_matrix",
    "solve_riccati_mfd",
    "integrate_covariance",
    "simulate_trajectory",
    "simulate_batch",
    "filter_innovations",
    "stationary_state",
]

SINGULAR_DET_TOL = 1e-12


@dataclass(frozen=True)
class SingleHomodyneConfig:
    bath: BathSpec
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


@dataclass(frozen=True)
class RiccatiSystem:
    """Coefficients of ``dZ/dt = Z T Z + R Z + Z R^dag + W`` and the MFD generator.

    ``upsilon = [[R, W], [-T, -R^dag]]`` drives the linear system for the
    numerator and denominator of ``Z = Z1 Z2^{-1}``.
    """

    T: np.ndarray
    R: np.ndarray
    W: np.ndarray

    @property
    def upsilon(self) -> np.ndarray:
        return np.block([[self.R, self.W], [-self.T, -self.R.conj().T]])


def _gain_factor(zeta, nu, bath, e):
    return e * (zeta - bath.m) + e.conjugate() * (nu - bath.n)


def drift_gain(state: GaussianMoments, bath: BathSpec, params: ModelParams):
    """Coefficients of ``d<a> = drift dt + gain dY~``.

    ``drift = -(i delta + mu/2) alpha - sqrt(mu) beta`` and
    ``gain = (sqrt(mu)/kappa) [e^{i theta}(zeta - m) + e^{-i theta}(nu - n)]``.
    """
    mu = params.mu
    drift = -(1j * params.delta + 0.5 * mu) * state.alpha - math.sqrt(mu) * bath.beta
    k = kappa(bath, params.theta)
    gain = math.sqrt(mu) / k * _gain_factor(state.zeta, state.nu, bath, params.phase)
    return drift, gain


def riccati_rhs(zeta, nu, bath: BathSpec, params: ModelParams):
    """Time derivatives ``(dzeta/dt, dnu/dt)`` of the conditional covariance parameters."""
    mu, delta = params.mu, params.delta
    c = mu / kappa(bath, params.theta)
    g = _gain_factor(zeta, nu, bath, params.phase)
    dzeta = -2j * delta * zeta - mu * (zeta - bath.m) - c * g * g
    dnu = -mu * (nu - bath.n) - c * abs(g) ** 2
    return dzeta, dnu


def build_riccati(bath: BathSpec, params: ModelParams) -> RiccatiSystem:
    mu, delta = params.mu, params.delta
    k = kappa(bath, params.theta)
    c = mu / k
    e2 = cmath.exp(2j * params.theta)
    n, m = bath.n, bath.m
    mc = m.conjugate()
    T = -c * np.array([[1.0, e2.conjugate()], [e2, 1.0]])
    R = np.diag([-1j * delta, 1j * delta]) + c * np.array(
        [
            [-k / 2 + n + e2 * m, m + n * e2.conjugate()],
            [mc + e2 * n, -k / 2 + n + mc * e2.conjugate()],
        ]
    )
    w_diag = n + n * n - abs(m) ** 2
    w_off = abs(m) ** 2 - n * n
    W = c * np.array([[w_diag, m + w_off * e2.conjugate()], [mc + e2 * w_off, w_diag]])
    return RiccatiSystem(T.astype(complex), R.astype(complex), W.astype(complex))


def riccati_matrix_rhs(sys: RiccatiSystem, Z) -> np.ndarray:
    Z = np.asarray(Z, dtype=complex)
    return Z @ sys.T @ Z + sys.R @ Z + Z @ sys.R.conj().T + sys.W


def covariance_matrix(zeta, nu) -> np.ndarray:
    """``[[nu, zeta], [conj(zeta), nu]]``."""
    zeta = complex(zeta)
    return np.array([[nu, zeta], [zeta.conjugate(), nu]], dtype=complex)


def solve_riccati_mfd(sys: RiccatiSystem, z0, t: float) -> np.ndarray:
    """Riccati solution at time ``t`` via ``[Z1; Z2] = exp(upsilon t) [Z(0); 1]``.

    Raises
    ------
    SingularDenominator
        When ``|det Z2(t)| < 1e-12``; the solution is never regularised.
    """
    z0 = as_cmat(z0, (2, 2))
    if t == 0:
        return z0.copy()
    stacked = mat_exp(sys.upsilon, t) @ np.vstack([z0, np.eye(2)])
    z1, z2 = stacked[:2], stacked[2:]
    det = np.linalg.det(z2)
    if abs(det) < SINGULAR_DET_TOL:
        raise SingularDenominator(t, det, np.linalg.cond(z2))
    return np.linalg.solve(z2.T, z1.T).T


def integrate_covariance(rhs, zeta0: complex, nu0: float, dt: float, steps: int):
    """RK4 integration of ``(zeta, nu)`` on the grid ``k dt, k = 0..steps``.

    ``rhs(zeta, nu)`` returns ``(dzeta, dnu)``.  Returns complex ``zeta`` and
    real ``nu`` arrays of length ``steps + 1``.
    """

    # Scalar arithmetic: for a two-component state this is several times
    # faster than stepping small numpy arrays.
    zeta = np.empty(steps + 1, dtype=complex)
    nu = np.empty(steps + 1)
    z, v = complex(zeta0), float(nu0)
    zeta[0], nu[0] = z, v
    h = 0.5 * dt
    for k in range(steps):
        z1, v1 = rhs(z, v)
        z2, v2 = rhs(z + h * z1, v + h * v1)
        z3, v3 = rhs(z + h * z2, v + h * v2)
        z4, v4 = rhs(z + dt * z3, v + dt * v3)
        z = z + dt / 6 * (z1 + 2 * z2 + 2 * z3 + z4)
        v = v + dt / 6 * (v1 + 2 * v2 + 2 * v3 + v4)
        zeta[k + 1], nu[k + 1] = z, v
    if not (cmath.isfinite(z) and math.isfinite(v)):
        raise IntegrationDiverged("covariance integration produced non-finite values")
    return zeta, nu


def _propagate_mean(alpha0, decay, forcing, gain, dy):
    """Euler-Maruyama for ``d alpha = (decay alpha + forcing) dt + gain dY~``.

    ``decay`` and ``forcing`` are already multiplied by ``dt``; ``gain`` has one
    entry per step and ``dy`` is ``(batch, steps)``.
    """
    batch, steps = dy.shape
    alpha = np.empty((batch, steps + 1), dtype=complex)
    alpha[:, 0] = alpha0
    a = np.full(batch, alpha0, dtype=complex)
    step = 1.0 + decay
    for k in range(steps):
        a = step * a + forcing + gain[k] * dy[:, k]
        alpha[:, k + 1] = a
    if not np.all(np.isfinite(a)):
        raise IntegrationDiverged("conditional mean became non-finite")
    return alpha


def _covariances(cfg: SingleHomodyneConfig, steps: int):
    zeta, nu = integrate_covariance(
        lambda z, v: riccati_rhs(z, v, cfg.bath, cfg.params),
        cfg.init.zeta, cfg.init.nu, cfg.dt, steps,
    )
    check_physical(zeta, nu, time_grid(cfg.t_final, cfg.dt))
    return zeta, nu


def simulate_batch(cfg: SingleHomodyneConfig, indices: Sequence[int],
                   covariances=None) -> list[TrajectoryRecord]:
    """Simulate the trajectories ``indices`` of the experiment ``cfg.seed``.

    Trajectory ``i`` draws its innovations from ``substream(cfg.seed, i)``, so
    the result for a given index does not depend on the batch it is run in.
    ``covariances`` may pass precomputed ``(zeta, nu)`` series to skip the
    (noise-independent) Riccati integration.
    """
    bath, params, dt = cfg.bath, cfg.params, cfg.dt
    steps = n_steps(cfg.t_final, dt)
    t = time_grid(cfg.t_final, dt)
    zeta, nu = covariances if covariances is not None else _covariances(cfg, steps)
    k = kappa(bath, params.theta)
    mu = params.mu
    e = params.phase

    z = np.stack([substream(cfg.seed, i).standard_normal(steps) for i in indices])
    dy = math.sqrt(k * dt) * z
    gain = math.sqrt(mu) / k * _gain_factor(zeta[:-1], nu[:-1], bath, e)
    alpha = _propagate_mean(
        cfg.init.alpha,
        -(1j * params.delta + 0.5 * mu) * dt,
        -math.sqrt(mu) * bath.beta * dt,
        gain, dy,
    )
    quad = 2.0 * (e * alpha[:, :-1]).real
    offset = 2.0 * (e * bath.beta).real
    out = dy + (math.sqrt(mu) * quad + offset) * dt

    records = []
    for row, i in enumerate(indices):
        innov = np.concatenate([[0.0], dy[row]])
        dY = np.concatenate([[0.0], out[row]])
        records.append(TrajectoryRecord(
            "single-homodyne", t, alpha[row], zeta, nu, innov, dY, cfg.seed, int(i)
        ))
    return records


def filter_innovations(cfg: SingleHomodyneConfig, dy, covariances=None):
    """Run the filter on given innovations ``dY~`` (shape ``(steps,)`` or ``(batch, steps)``).

    Returns ``(alpha, zeta, nu)`` on the grid ``k dt``, ``k = 0..steps``; ``alpha``
    has the shape of ``dy`` with one extra column.  Used to drive the filter
    with an externally supplied path, e.g. a coarsened fine path.
    """
    dy = np.asarray(dy, dtype=float)
    flat = dy.ndim == 1
    dy2 = np.atleast_2d(dy)
    steps = dy2.shape[1]
    bath, params, dt = cfg.bath, cfg.params, cfg.dt
    if covariances is None:
        covariances = integrate_covariance(
            lambda z, v: riccati_rhs(z, v, bath, params),
            cfg.init.zeta, cfg.init.nu, dt, steps,
        )
    zeta, nu = covariances
    gain = math.sqrt(params.mu) / kappa(bath, params.theta) * _gain_factor(
        zeta[:-1], nu[:-1], bath, params.phase)
    alpha = _propagate_mean(
        cfg.init.alpha,
        -(1j * params.delta + 0.5 * params.mu) * dt,
        -math.sqrt(params.mu) * bath.beta * dt,
        gain, dy2,
    )
    return (alpha[0] if flat else alpha), zeta, nu


def simulate_trajectory(cfg: SingleHomodyneConfig, index: int = 0) -> TrajectoryRecord:
    """One conditional trajectory.

    ``zeta`` and ``nu`` are advanced by RK4; the mean by Euler-Maruyama with
    innovations ``dY~ = sqrt(kappa dt) N(0, 1)``.  The record also carries the
    reconstructed photocurrent increment
    ``dY = dY~ + sqrt(mu) (e^{i theta} alpha + c.c.) dt + (e^{i theta} beta + c.c.) dt``.
    """
    return simulate_batch(cfg, [index])[0]


def stationary_state(bath: BathSpec, params: ModelParams) -> GaussianMoments:
    """Long-time conditional state.

    At resonance it is ``(-2 beta / sqrt(mu), m, n)``.  For an unsqueezed field
    (``m = 0``) the covariance limit ``(0, n)`` holds at any detuning, and the
    mean then relaxes to ``-sqrt(mu) beta / (i delta + mu/2)`` because the gain
    vanishes.

    Raises
    ------
    DetunedSystem
        For ``delta != 0`` with a squeezed field, where no closed form exists.
    """
    mu = params.mu
    if params.delta == 0:
        return GaussianMoments(-2 * bath.beta / math.sqrt(mu), bath.m, bath.n)
    if bath.m == 0:
        alpha = -math.sqrt(mu) * bath.beta / (1j * params.delta + 0.5 * mu)
        return GaussianMoments(alpha, 0j, bath.n)
    raise DetunedSystem(
        f"no closed-form single-homodyne stationary state for delta={params.delta!r} "
        f"and m={bath.m!r}; integrate to long times instead"
    )
