"""Small dense linear algebra and fixed-step integrators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import IntegrationDiverged, MatrixExpOverflow, NotPositiveDefinite

__all__ = ["NoiseCov2", "mat_exp", "cholesky2", "rk4_step", "as_cmat"]

# Numerator coefficients of the [6/6] diagonal Pade approximant to exp(x):
# b_k = (12 - k)! 6! / (12! k! (6 - k)!).
_PADE6 = np.array([1.0, 1 / 2, 5 / 44, 1 / 66, 1 / 792, 1 / 15840, 1 / 665280])
# With ||A||_1 <= 0.5 the [6/6] truncation error is below 1e-17 relative.
_THETA6 = 0.5


def as_cmat(a, shape=None) -> np.ndarray:
    """Convert to a finite complex matrix of an allowed small shape."""
    m = np.array(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] not in (2, 4) or m.shape[1] not in (2, 4):
        raise ValueError(f"expected a 2x2, 2x4, 4x2 or 4x4 matrix, got shape {m.shape}")
    if shape is not None and m.shape != shape:
        raise ValueError(f"expected shape {shape}, got {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def mat_exp(m, t: float = 1.0) -> np.ndarray:
    """Matrix exponential ``exp(m t)`` by scaling and squaring.

    The scaled matrix ``m t / 2**s`` is brought to 1-norm at most 0.5, its
    exponential is taken with the [6/6] diagonal Pade approximant and the
    result is squared ``s`` times.  No eigendecomposition is used, so defective
    and strongly non-normal matrices are handled.

    Parameters
    ----------
    m : array_like, shape (n, n)
        Square complex matrix with finite entries.
    t : float
        Time multiplier.

    Returns
    -------
    ndarray
        ``exp(m t)``.

    Raises
    ------
    MatrixExpOverflow
        If the result has non-finite entries.
    """
    a = np.array(m, dtype=complex) * t
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"mat_exp needs a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise MatrixExpOverflow("matrix exponential argument has non-finite entries")
    n = a.shape[0]
    norm = np.abs(a).sum(axis=0).max()
    s = 0
    if norm > _THETA6:
        s = max(0, int(math.ceil(math.log2(norm / _THETA6))))
        a = a / 2.0 ** s
    eye = np.eye(n, dtype=complex)
    a2 = a @ a
    a4 = a2 @ a2
    a6 = a4 @ a2
    b = _PADE6
    u = a @ (b[1] * eye + b[3] * a2 + b[5] * a4)
    v = b[0] * eye + b[2] * a2 + b[4] * a4 + b[6] * a6
    r = np.linalg.solve(v - u, v + u)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(s):
            r = r @ r
    if not np.all(np.isfinite(r)):
        raise MatrixExpOverflow(
            f"exp(m t) overflowed (||m t||_1 = {norm:.3e}, {s} squarings)"
        )
    return r


@dataclass(frozen=True)
class NoiseCov2:
    """Real symmetric positive definite 2x2 covariance (per unit time)."""

    c11: float
    c12: float
    c22: float

    def __post_init__(self):
        if not (self.c11 > 0 and self.c22 > 0 and self.det > 0):
            raise NotPositiveDefinite(
                f"covariance [[{self.c11}, {self.c12}], [{self.c12}, {self.c22}]] "
                f"is not positive definite"
            )

    @property
    def det(self) -> float:
        return self.c11 * self.c22 - self.c12 * self.c12

    def as_array(self) -> np.ndarray:
        return np.array([[self.c11, self.c12], [self.c12, self.c22]])


def cholesky2(c) -> np.ndarray:
    """Lower-triangular ``L`` with ``L @ L.T == c`` for a 2x2 covariance.

    Accepts a :class:`NoiseCov2` or any symmetric 2x2 array.
    """
    if not isinstance(c, NoiseCov2):
        arr = np.asarray(c, dtype=float)
        if arr.shape != (2, 2) or arr[0, 1] != arr[1, 0]:
            raise NotPositiveDefinite(f"expected a symmetric 2x2 matrix, got {arr!r}")
        c = NoiseCov2(arr[0, 0], arr[0, 1], arr[1, 1])
    l11 = math.sqrt(c.c11)
    l21 = c.c12 / l11
    l22 = math.sqrt(c.c22 - l21 * l21)
    return np.array([[l11, 0.0], [l21, l22]])


def rk4_step(f, y, t: float, dt: float):
    """One classical fourth-order Runge-Kutta step of ``y' = f(t, y)``.

    ``y`` may be a scalar or an array; ``f`` must return the same type.
    Raises :class:`IntegrationDiverged` when the new state is not finite.
    """
    if not dt > 0:
        raise ValueError(f"dt must be positive, got {dt!r}")
    h2 = 0.5 * dt
    k1 = f(t, y)
    k2 = f(t + h2, y + h2 * k1)
    k3 = f(t + h2, y + h2 * k2)
    k4 = f(t + dt, y + dt * k3)
    y_new = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(y_new)):
        raise IntegrationDiverged(f"non-finite state after RK4 step at t={t!r}")
    return y_new
