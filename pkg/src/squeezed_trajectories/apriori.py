"""Unconditional (a priori) evolution and ensemble averages of conditional trajectories.

Averaging the conditional state over all measurement records gives the
master-equation state.  At the level of Gaussian parameters the mixture of
conditional states with common covariance ``(zeta_c, nu_c)`` and random means
``alpha`` has, by the law of total covariance::

    <a>         = E[alpha]
    zeta_uncond = zeta_c + E[alpha^2] - E[alpha]^2
    nu_uncond   = nu_c   + E[|alpha|^2] - |E[alpha]|^2
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import GridMismatch
from .gaussian import BathSpec, GaussianMoments, ModelParams

__all__ = [
    "AprioriSolution",
    "apriori_closed_form",
    "apriori_rhs",
    "apriori_asymptote",
    "EnsembleAverage",
    "EnsembleAccumulator",
    "ensemble_average",
]


def _closed_form(init: GaussianMoments, bath1: BathSpec, params: ModelParams, t):
    mu, delta = params.mu, params.delta
    lam = 1j * delta + 0.5 * mu
    lam2 = 2j * delta + mu
    # e^{-lam t} [alpha0 - drive/lam (e^{lam t} - 1)], written without e^{+lam t}
    decay = np.exp(-lam * t)
    alpha = decay * init.alpha - math.sqrt(mu) * bath1.beta / lam * (1 - decay)
    zeta_inf = mu * bath1.m / lam2
    zeta = np.exp(-lam2 * t) * (init.zeta - zeta_inf) + zeta_inf
    nu = np.exp(-mu * t) * (init.nu - bath1.n) + bath1.n
    return alpha, zeta, nu


def apriori_closed_form(init: GaussianMoments, bath1: BathSpec, params: ModelParams,
                        t: float) -> GaussianMoments:
    """Exact solution of the a priori parameter equations at time ``t``."""
    if t == 0:
        return init
    return GaussianMoments(*_closed_form(init, bath1, params, float(t)))


def apriori_asymptote(bath1: BathSpec, params: ModelParams) -> GaussianMoments:
    """``(-sqrt(mu) beta / (i delta + mu/2), mu m / (2 i delta + mu), n)``."""
    mu, delta = params.mu, params.delta
    return GaussianMoments(
        -math.sqrt(mu) * bath1.beta / (1j * delta + 0.5 * mu),
        mu * bath1.m / (2j * delta + mu),
        bath1.n,
    )


def apriori_rhs(g: GaussianMoments, bath1: BathSpec, params: ModelParams):
    """``(d alpha/dt, d zeta/dt, d nu/dt)`` of the master-equation Gaussian parameters."""
    mu, delta = params.mu, params.delta
    return (
        -(1j * delta + 0.5 * mu) * g.alpha - math.sqrt(mu) * bath1.beta,
        -2j * delta * g.zeta - mu * (g.zeta - bath1.m),
        -mu * (g.nu - bath1.n),
    )


@dataclass(frozen=True)
class AprioriSolution:
    """Callable ``t -> GaussianMoments`` for fixed initial state, bath and model."""

    init: GaussianMoments
    bath1: BathSpec
    params: ModelParams

    def __call__(self, t: float) -> GaussianMoments:
        return apriori_closed_form(self.init, self.bath1, self.params, t)

    def series(self, times):
        """Arrays ``(alpha, zeta, nu)`` on a time grid."""
        return _closed_form(self.init, self.bath1, self.params, np.asarray(times, dtype=float))


@dataclass
class EnsembleAverage:
    t: np.ndarray
    alpha: np.ndarray
    alpha_stderr: np.ndarray  # complex: real/imag parts are the per-component standard errors
    zeta: np.ndarray
    nu: np.ndarray
    count: int

    @property
    def dx2(self):
        return 1.0 + 2.0 * self.nu + 2.0 * self.zeta.real

    @property
    def dp2(self):
        return 1.0 + 2.0 * self.nu - 2.0 * self.zeta.real


class EnsembleAccumulator:
    """Streaming sums over trajectory records sharing one time grid.

    Feed records with :meth:`add` (in any order, in any number of batches)
    and read the mixture moments with :meth:`result`.
    """

    def __init__(self):
        self.count = 0
        self.t = None
        self._sum_alpha = None
        self._sum_alpha2 = None
        self._sum_re2 = None
        self._sum_im2 = None
        self._sum_zeta = None
        self._sum_nu = None

    def add(self, record) -> None:
        if self.t is None:
            self.t = np.asarray(record.t)
            shape = self.t.shape
            self._sum_alpha = np.zeros(shape, complex)
            self._sum_alpha2 = np.zeros(shape, complex)
            self._sum_re2 = np.zeros(shape)
            self._sum_im2 = np.zeros(shape)
            self._sum_zeta = np.zeros(shape, complex)
            self._sum_nu = np.zeros(shape)
        elif len(record.t) != len(self.t) or not np.array_equal(record.t, self.t):
            raise GridMismatch(
                f"record {record.index} has a different time grid "
                f"({len(record.t)} points vs {len(self.t)})"
            )
        a = record.alpha
        self._sum_alpha += a
        self._sum_alpha2 += a * a
        self._sum_re2 += a.real ** 2
        self._sum_im2 += a.imag ** 2
        self._sum_zeta += record.zeta
        self._sum_nu += record.nu
        self.count += 1

    def merge(self, other: EnsembleAccumulator) -> None:
        if other.count == 0:
            return
        if self.count == 0:
            self.__dict__.update({k: (v.copy() if isinstance(v, np.ndarray) else v)
                                  for k, v in other.__dict__.items()})
            return
        if not np.array_equal(other.t, self.t):
            raise GridMismatch("cannot merge accumulators over different time grids")
        for name in ("_sum_alpha", "_sum_alpha2", "_sum_re2", "_sum_im2", "_sum_zeta", "_sum_nu"):
            getattr(self, name).__iadd__(getattr(other, name))
        self.count += other.count

    def result(self) -> EnsembleAverage:
        if self.count == 0:
            raise GridMismatch("ensemble average of an empty set of trajectories")
        m = self.count
        mean = self._sum_alpha / m
        pseudo_var = self._sum_alpha2 / m - mean * mean
        var_re = np.maximum(self._sum_re2 / m - mean.real ** 2, 0.0)
        var_im = np.maximum(self._sum_im2 / m - mean.imag ** 2, 0.0)
        # standard errors use the unbiased (m - 1) variance
        corr = m / (m - 1) if m > 1 else 0.0
        stderr = np.sqrt(var_re * corr / m) + 1j * np.sqrt(var_im * corr / m)
        return EnsembleAverage(
            t=self.t,
            alpha=mean,
            alpha_stderr=stderr,
            zeta=self._sum_zeta / m + pseudo_var,
            nu=self._sum_nu / m + var_re + var_im,
            count=m,
        )


def ensemble_average(records: Iterable) -> EnsembleAverage:
    """Mixture moments of conditional trajectories on a common grid.

    The unconditional second moments use population (1/M) sample moments, so
    the result is exactly the Gaussian-parameter description of the empirical
    mixture of the M conditional states.  The reported standard error of the
    mean uses the unbiased variance.

    Raises
    ------
    GridMismatch
        If ``records`` is empty or the time grids differ.
    """
    acc = EnsembleAccumulator()
    for r in records:
        acc.add(r)
    return acc.result()
