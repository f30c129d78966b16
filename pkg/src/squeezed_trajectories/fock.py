"""Brute-force density-matrix integration on a truncated Fock space.

This is the independent check on the Gaussian-parameter filters: the
stochastic master equations for single- and double-homodyne detection and
the a priori master equation are integrated directly for an ``N x N`` density
matrix, without assuming Gaussianity.

Density matrices are plain complex arrays of shape ``(..., N, N)``; every
step function broadcasts over leading axes, so an ensemble of trajectories
can be advanced in one call.  After each stochastic step the state is
Hermitized, ``(rho + rho^dag) / 2``, and then its trace is renormalised to
one, in that order.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np
import scipy.linalg
import scipy.sparse

from .errors import IntegrationDiverged, TruncationLeak
from .gaussian import BathSpec, GaussianMoments, ModelParams, delta_det, kappa

logger = logging.getLogger(__name__)

LEAK_TOL = 1e-6
NEGATIVE_EIG_TOL = 1e-8

__all__ = [
    "ModeOperators",
    "build_operators",
    "master_rhs",
    "master_step",
    "single_gain_operator",
    "double_gain_operators",
    "sme_step_single",
    "sme_step_double",
    "extract_moments",
    "purity",
    "min_eigenvalue",
    "coherent_state",
    "thermal_state",
    "gaussian_state",
    "suggest_dim",
    "OracleRun",
    "run_sme_single",
    "run_sme_double",
    "run_master",
]


@dataclass(frozen=True)
class ModeOperators:
    """Truncated ladder operators of one mode (``<k|a|k+1> = sqrt(k+1)``)."""

    a: np.ndarray
    ad: np.ndarray
    num: np.ndarray

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    @cached_property
    def sqrt_k(self) -> np.ndarray:
        """``sqrt(1), ..., sqrt(dim - 1)``: the nonzero entries of ``a``."""
        return np.sqrt(np.arange(1, self.dim, dtype=float))

    # Products with the ladder operators are row or column shifts; these
    # O(dim^2) versions replace dense matrix products in the integrators.

    def a_left(self, x):
        """``a @ x``."""
        out = np.zeros_like(x)
        out[..., :-1, :] = self.sqrt_k[:, None] * x[..., 1:, :]
        return out

    def ad_left(self, x):
        """``a^dag @ x``."""
        out = np.zeros_like(x)
        out[..., 1:, :] = self.sqrt_k[:, None] * x[..., :-1, :]
        return out

    def a_right(self, x):
        """``x @ a``."""
        out = np.zeros_like(x)
        out[..., :, 1:] = x[..., :, :-1] * self.sqrt_k
        return out

    def ad_right(self, x):
        """``x @ a^dag``."""
        out = np.zeros_like(x)
        out[..., :, :-1] = x[..., :, 1:] * self.sqrt_k
        return out


def build_operators(dim: int) -> ModeOperators:
    if dim < 2:
        raise ValueError(f"Fock truncation needs dim >= 2, got {dim}")
    a = np.diag(np.sqrt(np.arange(1, dim, dtype=float)), k=1).astype(complex)
    ad = a.conj().T.copy()
    return ModeOperators(a, ad, np.diag(np.arange(dim, dtype=float)).astype(complex))


def suggest_dim(g: GaussianMoments) -> int:
    """Truncation heuristic ``ceil(|alpha|^2 + 6 sqrt(|alpha|^2 + nu + |zeta|) + 10)``."""
    a2 = abs(g.alpha) ** 2
    return int(math.ceil(a2 + 6 * math.sqrt(a2 + g.nu + abs(g.zeta)) + 10))


def _expect(op, rho):
    """``Tr(op rho)`` over the trailing two axes."""
    return np.einsum("ij,...ji->...", op, rho)


def _dag(x):
    return np.swapaxes(x, -1, -2).conj()


@dataclass(frozen=True)
class _Generators:
    """Fixed operators of the compact master-equation form.

    With ``G = (mu/2)[(n+1) a^dag a + n a a^dag - m* a^2 - m a^dag^2]`` and
    ``H = -i delta a^dag a + sqrt(mu) (beta* a - beta a^dag)`` the right-hand
    side is ``K rho + rho K^dag + (a rho) P + (a^dag rho) Q`` with ``K = H - G``,
    ``P = mu [(n+1) a^dag - m* a]`` and ``Q = mu [n a - m a^dag]``.  ``P`` and
    ``Q`` are kept as their coefficients ``p_ad, p_a, q_a, q_ad``.
    """

    K: np.ndarray
    p_ad: float
    p_a: complex
    q_a: float
    q_ad: complex


def _generators(ops: ModeOperators, bath1: BathSpec, params: ModelParams) -> _Generators:
    key = (id(ops), bath1, params)
    cached = _GEN_CACHE.get(key)
    if cached is not None and cached[0] is ops:
        return cached[1]
    a, ad = ops.a, ops.ad
    mu, n, m, beta = params.mu, bath1.n, bath1.m, bath1.beta
    mc = m.conjugate()
    sq = math.sqrt(mu)
    h = -1j * params.delta * ops.num + sq * (beta.conjugate() * a - beta * ad)
    g = 0.5 * mu * ((n + 1) * (ad @ a) + n * (a @ ad) - mc * (a @ a) - m * (ad @ ad))
    gen = _Generators(h - g, mu * (n + 1), -mu * mc, mu * n, -mu * m)
    if len(_GEN_CACHE) > 64:
        _GEN_CACHE.clear()
    _GEN_CACHE[key] = (ops, gen)
    return gen


_GEN_CACHE: dict = {}


def _drift(rho, ops: ModeOperators, gen: _Generators):
    # rho K^dag = (K rho)^dag for Hermitian rho
    k_rho = gen.K @ rho
    a_rho, ad_rho = ops.a_left(rho), ops.ad_left(rho)
    return (k_rho + _dag(k_rho)
            + gen.p_ad * ops.ad_right(a_rho) + gen.p_a * ops.a_right(a_rho)
            + gen.q_a * ops.a_right(ad_rho) + gen.q_ad * ops.ad_right(ad_rho))


def master_rhs(rho, ops: ModeOperators, bath1: BathSpec, params: ModelParams):
    """Right-hand side of the a priori master equation for mode + bath 1.

    Equal, term by term, to the Hamiltonian, drive and four dissipator lines
    ``(mu/2)(n+1)([a rho, a^dag] + [a, rho a^dag]) + ...``; evaluated in the
    compact form of :class:`_Generators`.  ``rho`` must be Hermitian.
    """
    return _drift(rho, ops, _generators(ops, bath1, params))


def _tr(x):
    return np.trace(x, axis1=-2, axis2=-1)[..., None, None]


# Every gain operator has the form G(rho) = B rho - Tr(B rho) rho with a linear
# map B = sum_j w_j A_j, where A_j x = U_j x + s_j x U_j^dag, s_j = +-1, and
# U_j = u_a a + u_ad a^dag.  _Gain holds these coefficients; the dense
# functions below and the sparse superoperators are both built from it.

@dataclass(frozen=True)
class _Gain:
    terms: tuple  # ((w, u_a, u_ad, sign), ...)


def _single_gain(bath1: BathSpec, params: ModelParams) -> _Gain:
    e = params.phase
    ec = e.conjugate()
    n, m = bath1.n, bath1.m
    c = math.sqrt(params.mu) / kappa(bath1, params.theta)
    return _Gain(((c, e + e * n + ec * m.conjugate(), -(ec * n + e * m), 1),))


def _double_gains(bath1: BathSpec, bath2: BathSpec, params: ModelParams):
    n, m = bath1.n, bath1.m
    mc = m.conjugate()
    s = 1.0 + n + bath2.n
    p = m.real + bath2.m.real
    q = m.imag - bath2.m.imag
    pref = math.sqrt(2 * params.mu) / (2 * delta_det(bath1, bath2))
    u1 = (1 + n + mc, -(n + m), 1)
    u2 = (1 + n - mc, n - m, -1)
    return (_Gain(((pref * (s - p),) + u1, (1j * pref * q,) + u2)),
            _Gain(((-pref * q,) + u1, (-1j * pref * (s + p),) + u2)))


def _linear(x, ops: ModeOperators, gain: _Gain):
    """``B x`` for Hermitian ``x``."""
    ax, adx = ops.a_left(x), ops.ad_left(x)
    out = 0
    for w, ua, uad, sign in gain.terms:
        ux = ua * ax + uad * adx
        out = out + w * (ux + sign * _dag(ux))
    return out


def single_gain_operator(rho, ops: ModeOperators, bath1: BathSpec, params: ModelParams):
    """Coefficient of ``dY~`` in the single-homodyne stochastic master equation.

    ``(sqrt(mu)/kappa){e a rho + e* rho a^dag - <e a + e* a^dag> rho
    + (e n + e* m*)[a, rho] + (e* n + e m)[rho, a^dag]}`` with ``e = e^{i theta}``,
    which equals ``U rho + rho U^dag - <U + U^dag> rho`` (times the prefactor)
    for ``U = (e + e n + e* m*) a - (e* n + e m) a^dag``.
    """
    b_rho = _linear(rho, ops, _single_gain(bath1, params))
    return b_rho - _tr(b_rho) * rho


def double_gain_operators(rho, ops: ModeOperators, bath1: BathSpec, bath2: BathSpec,
                          params: ModelParams):
    """Coefficients ``(K1, K2)`` of ``dY~1`` and ``dY~2`` in the double-homodyne equation.

    ``K1 = c [(1+n1+n2-m1'-m2') J1 + i(m1''-m2'') J2]`` and
    ``K2 = (c/i) [(1+n1+n2+m1'+m2') J2 - i(m1''-m2'') J1]`` with
    ``c = sqrt(2 mu) / (2 Delta)``.  ``J1`` is Hermitian and ``J2``
    anti-Hermitian::

        J1 = U1 rho + rho U1^dag - <U1 + U1^dag> rho,  U1 = (1+n1+m1*) a - (n1+m1) a^dag
        J2 = U2 rho - rho U2^dag - <U2 - U2^dag> rho,  U2 = (1+n1-m1*) a + (n1-m1) a^dag
    """
    out = []
    for g in _double_gains(bath1, bath2, params):
        b = _linear(rho, ops, g)
        out.append(b - _tr(b) * rho)
    return tuple(out)


# -- sparse superoperators --------------------------------------------------
# The integrators keep states as columns of row-major vec(rho), shape
# (dim^2, batch), and apply CSR superoperators: vec(A X B) = kron(A, B^T) vec X.

@dataclass(frozen=True)
class _Superops:
    drift: scipy.sparse.csr_matrix
    gains: tuple
    cov: np.ndarray  # innovation covariance rates C_jk


def _sparse_gain(ops: ModeOperators, gain: _Gain):
    a = scipy.sparse.csr_matrix(ops.a)
    ad = scipy.sparse.csr_matrix(ops.ad)
    eye = scipy.sparse.identity(ops.dim, dtype=complex, format="csr")
    out = 0
    for w, ua, uad, sign in gain.terms:
        u = ua * a + uad * ad
        out = out + w * (scipy.sparse.kron(u, eye) + sign * scipy.sparse.kron(eye, u.conj()))
    return out.tocsr()


def _sparse_drift(ops: ModeOperators, gen: _Generators):
    a = scipy.sparse.csr_matrix(ops.a)
    ad = scipy.sparse.csr_matrix(ops.ad)
    k = scipy.sparse.csr_matrix(gen.K)
    eye = scipy.sparse.identity(ops.dim, dtype=complex, format="csr")
    p = gen.p_ad * ad + gen.p_a * a
    q = gen.q_a * a + gen.q_ad * ad
    return (scipy.sparse.kron(k, eye) + scipy.sparse.kron(eye, k.conj())
            + scipy.sparse.kron(a, p.T) + scipy.sparse.kron(ad, q.T)).tocsr()


def _superops(ops: ModeOperators, bath1: BathSpec, params: ModelParams,
              bath2: Optional[BathSpec] = None, measured: bool = True) -> _Superops:
    key = ("sup", id(ops), bath1, bath2, params, measured)
    cached = _GEN_CACHE.get(key)
    if cached is not None and cached[0] is ops:
        return cached[1]
    drift = _sparse_drift(ops, _generators(ops, bath1, params))
    if not measured:
        gains, cov = (), np.zeros((0, 0))
    elif bath2 is None:
        gains = (_sparse_gain(ops, _single_gain(bath1, params)),)
        cov = np.array([[kappa(bath1, params.theta)]])
    else:
        gains = tuple(_sparse_gain(ops, g) for g in _double_gains(bath1, bath2, params))
        s = 1.0 + bath1.n + bath2.n
        p = bath1.m.real + bath2.m.real
        q = bath1.m.imag - bath2.m.imag
        cov = np.array([[s + p, q], [q, s - p]])
    sup = _Superops(drift, gains, cov)
    if len(_GEN_CACHE) > 64:
        _GEN_CACHE.clear()
    _GEN_CACHE[key] = (ops, sup)
    return sup


@dataclass(frozen=True)
class _Layout:
    dim: int

    @property
    def diag(self) -> slice:
        """Rows of the diagonal entries ``rho[k, k]``."""
        return slice(None, None, self.dim + 1)

    @property
    def top(self) -> list:
        """Rows of the two highest Fock-level populations."""
        d = self.dim
        return [(d - 2) * (d + 1), d * d - 1]


def _layout(dim: int) -> _Layout:
    return _Layout(dim)


def _to_cols(rho):
    rho = np.asarray(rho, dtype=complex)
    d = rho.shape[-1]
    return np.ascontiguousarray(rho.reshape(-1, d * d).T)


def _from_cols(x, shape):
    return x.T.reshape(shape)


def _finish_cols(x, lay: _Layout, check_leak: bool = True):
    d = lay.dim
    v = x.reshape(d, d, -1)
    x = (0.5 * (v + v.transpose(1, 0, 2).conj())).reshape(d * d, -1)
    x /= x[lay.diag].sum(axis=0).real
    if not np.all(np.isfinite(x)):
        raise IntegrationDiverged("density matrix became non-finite")
    if check_leak:
        worst = float(np.max(x[lay.top].real.sum(axis=0)))
        if worst > LEAK_TOL:
            raise TruncationLeak(worst, lay.dim)
    return x


def _sme_cols(x, sup: _Superops, lay: _Layout, dy, dt: float, scheme: str, check_leak: bool):
    """One SME step on columns ``x``; ``dy`` has shape ``(channels, batch)``."""
    if scheme not in ("euler", "milstein"):
        raise ValueError(f"unknown scheme {scheme!r}")
    new = x + dt * (sup.drift @ x)
    b_x = [b @ x for b in sup.gains]
    tr_b = [bx[lay.diag].sum(axis=0) for bx in b_x]
    gains = [bx - t * x for bx, t in zip(b_x, tr_b)]
    for j, g in enumerate(gains):
        new += dy[j] * g
    if scheme == "milstein":
        # (1/2) sum_jk G_j'[G_k] (dY_j dY_k - C_jk dt),
        # G_j'[X] = B_j X - Tr(B_j X) x - Tr(B_j x) X
        for j, b in enumerate(sup.gains):
            for k, g in enumerate(gains):
                bg = b @ g
                corr = bg - bg[lay.diag].sum(axis=0) * x - tr_b[j] * g
                new += 0.5 * (dy[j] * dy[k] - sup.cov[j, k] * dt) * corr
    return _finish_cols(new, lay, check_leak)


def _master_cols(x, sup: _Superops, lay: _Layout, dt: float, method: str, check_leak: bool):
    f = sup.drift
    if method == "euler":
        new = x + dt * (f @ x)
    elif method == "rk4":
        k1 = f @ x
        k2 = f @ (x + 0.5 * dt * k1)
        k3 = f @ (x + 0.5 * dt * k2)
        k4 = f @ (x + dt * k3)
        new = x + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
    else:
        raise ValueError(f"unknown method {method!r}")
    return _finish_cols(new, lay, check_leak)


def master_step(rho, ops: ModeOperators, bath1: BathSpec, params: ModelParams, dt: float,
                method: str = "rk4", check_leak: bool = True):
    """One step of the a priori master equation.

    ``method="euler"`` is the deterministic part of :func:`sme_step_single`;
    ``method="rk4"`` is the classical Runge-Kutta step used for accuracy.
    """
    rho = np.asarray(rho, dtype=complex)
    sup = _superops(ops, bath1, params, measured=False)
    x = _master_cols(_to_cols(rho), sup, _layout(ops.dim), dt, method, check_leak)
    return _from_cols(x, rho.shape)


def sme_step_single(rho, ops: ModeOperators, bath1: BathSpec, params: ModelParams,
                    dw, dt: float, check_leak: bool = True, scheme: str = "euler"):
    """One step of the single-homodyne stochastic master equation.

    ``dw`` is a standard Wiener increment (variance ``dt``; an array for a
    batch of states); the innovation is ``dY~ = sqrt(kappa) dw``.

    ``scheme="euler"`` (default) is Euler-Maruyama, strong order 1/2.
    ``scheme="milstein"`` adds ``(1/2) G'(rho)[G(rho)] (dY~^2 - kappa dt)``
    for the gain operator ``G``, which raises the strong order to 1.
    """
    rho = np.asarray(rho, dtype=complex)
    k = kappa(bath1, params.theta)
    dy = math.sqrt(k) * np.asarray(dw, dtype=float).reshape(1, -1)
    sup = _superops(ops, bath1, params)
    x = _sme_cols(_to_cols(rho), sup, _layout(ops.dim), dy, dt, scheme, check_leak)
    return _from_cols(x, rho.shape)


def sme_step_double(rho, ops: ModeOperators, bath1: BathSpec, bath2: BathSpec,
                    params: ModelParams, dy, dt: float, check_leak: bool = True,
                    scheme: str = "euler"):
    """One step of the double-homodyne stochastic master equation.

    ``dy[..., 0]`` and ``dy[..., 1]`` are the innovations ``dY~1, dY~2`` with
    covariance ``C dt``, ``C = noise_cov(bath1, bath2)``.

    ``scheme="milstein"`` adds ``(1/2) sum_jk K_j'[K_k] (dY~j dY~k - C_jk dt)``.
    No iterated-integral (Levy area) terms are included: the linear parts of
    ``K1`` and ``K2`` commute up to a multiple of the identity, which the
    normalisation removes, so the noise is commutative.
    """
    rho = np.asarray(rho, dtype=complex)
    y = np.asarray(dy, dtype=float).reshape(-1, 2).T
    sup = _superops(ops, bath1, params, bath2)
    x = _sme_cols(_to_cols(rho), sup, _layout(ops.dim), y, dt, scheme, check_leak)
    return _from_cols(x, rho.shape)


def purity(rho):
    return np.sum(np.abs(rho) ** 2, axis=(-2, -1))


def min_eigenvalue(rho) -> float:
    return float(np.min(np.linalg.eigvalsh(rho)))


def extract_moments(rho, ops: ModeOperators):
    """``(alpha, zeta, nu, purity)`` of a density matrix (broadcasts over batches)."""
    alpha = _expect(ops.a, rho)
    a_sq = _expect(ops.a @ ops.a, rho)
    num = _expect(ops.num, rho).real
    return alpha, a_sq - alpha * alpha, num - np.abs(alpha) ** 2, purity(rho)


def coherent_state(alpha: complex, dim: int) -> np.ndarray:
    """Truncated, renormalised ``|alpha><alpha|``."""
    k = np.arange(dim)
    logfact = np.array([math.lgamma(j + 1) for j in k])
    if alpha == 0:
        amp = (k == 0).astype(complex)
    else:
        amp = np.exp(k * np.log(complex(alpha)) - 0.5 * logfact)
    amp = amp / np.linalg.norm(amp)
    return np.outer(amp, amp.conj())


def thermal_state(nbar: float, dim: int) -> np.ndarray:
    """Truncated, renormalised thermal state with geometric weights."""
    if nbar == 0:
        p = (np.arange(dim) == 0).astype(float)
    else:
        p = (nbar / (1 + nbar)) ** np.arange(dim)
    return np.diag(p / p.sum()).astype(complex)


def gaussian_state(g: GaussianMoments, dim: int, pad: Optional[int] = None) -> np.ndarray:
    """Density matrix of the Gaussian state ``g`` truncated to ``dim`` levels.

    Built as ``D(alpha) S(xi) rho_th S(xi)^dag D(alpha)^dag`` in a padded space
    of ``dim + pad`` levels, then cut to ``dim`` and renormalised.
    """
    gap = (1 + 2 * g.nu) ** 2 - 4 * abs(g.zeta) ** 2
    if gap < 1 - 1e-12:
        raise ValueError(f"non-physical Gaussian state {g!r}")
    big = dim + (pad if pad is not None else max(dim, 40))
    ops = build_operators(big)
    nbar = max(0.0, (math.sqrt(gap) - 1) / 2)
    rho = thermal_state(nbar, big)
    if abs(g.zeta) > 0:
        r = 0.5 * math.atanh(2 * abs(g.zeta) / (1 + 2 * g.nu))
        xi = r * np.exp(1j * (np.angle(g.zeta) + math.pi))
        s = scipy.linalg.expm(0.5 * (np.conj(xi) * ops.a @ ops.a - xi * ops.ad @ ops.ad))
        rho = s @ rho @ s.conj().T
    if g.alpha != 0:
        d = scipy.linalg.expm(g.alpha * ops.ad - np.conj(g.alpha) * ops.a)
        rho = d @ rho @ d.conj().T
    rho = rho[:dim, :dim]
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


@dataclass
class OracleRun:
    """Moments of an oracle trajectory sampled every ``stride`` steps."""

    t: np.ndarray
    alpha: np.ndarray
    zeta: np.ndarray
    nu: np.ndarray
    purity: np.ndarray
    rho: np.ndarray
    min_eig: float

    @property
    def dx2(self):
        return 1.0 + 2.0 * self.nu + 2.0 * self.zeta.real

    @property
    def dp2(self):
        return 1.0 + 2.0 * self.nu - 2.0 * self.zeta.real


def _run(rho0, ops, step, increments, dt, stride):
    """Drive ``step(columns, increment)`` and sample the moments every ``stride`` steps."""
    steps = len(increments) if increments is not None else 0
    samples = steps // stride + 1
    rho0 = np.array(rho0, dtype=complex)
    shape = rho0.shape
    batch = shape[:-2]
    alpha = np.empty((samples,) + batch, complex)
    zeta = np.empty((samples,) + batch, complex)
    nu = np.empty((samples,) + batch)
    pur = np.empty((samples,) + batch)
    min_eig = math.inf

    def record(j, r):
        nonlocal min_eig
        alpha[j], zeta[j], nu[j], pur[j] = extract_moments(r, ops)
        lo = min_eigenvalue(r)
        min_eig = min(min_eig, lo)
        if lo < -NEGATIVE_EIG_TOL:
            logger.warning("oracle state has eigenvalue %.3e at t=%.6g", lo, j * stride * dt)

    record(0, rho0)
    x = _to_cols(rho0)
    for k in range(steps):
        x = step(x, increments[k])
        if (k + 1) % stride == 0:
            record((k + 1) // stride, _from_cols(x, shape))
    t = dt * stride * np.arange(samples)
    return OracleRun(t, alpha, zeta, nu, pur, _from_cols(x, shape).copy(), min_eig)


def run_sme_single(rho0, ops: ModeOperators, bath1: BathSpec, params: ModelParams,
                   dw, dt: float, stride: int = 1, scheme: str = "euler") -> OracleRun:
    """Integrate the single-homodyne SME along Wiener increments ``dw`` (``(steps, ...)``).

    ``scheme`` is as in :func:`sme_step_single`.
    """
    sup, lay = _superops(ops, bath1, params), _layout(ops.dim)
    scale = math.sqrt(kappa(bath1, params.theta))
    dw = np.asarray(dw, dtype=float)
    dy = scale * dw.reshape(len(dw), 1, -1)

    def step(x, y):
        return _sme_cols(x, sup, lay, y, dt, scheme, True)

    return _run(rho0, ops, step, dy, dt, stride)


def run_sme_double(rho0, ops: ModeOperators, bath1: BathSpec, bath2: BathSpec,
                   params: ModelParams, dy, dt: float, stride: int = 1,
                   scheme: str = "euler") -> OracleRun:
    """Integrate the double-homodyne SME along innovations ``dy`` (``(steps, ..., 2)``)."""
    sup, lay = _superops(ops, bath1, params, bath2), _layout(ops.dim)
    dy = np.asarray(dy, dtype=float)
    cols = np.ascontiguousarray(dy.reshape(len(dy), -1, 2).transpose(0, 2, 1))

    def step(x, y):
        return _sme_cols(x, sup, lay, y, dt, scheme, True)

    return _run(rho0, ops, step, cols, dt, stride)


def run_master(rho0, ops: ModeOperators, bath1: BathSpec, params: ModelParams,
               dt: float, steps: int, stride: int = 1, method: str = "rk4") -> OracleRun:
    sup, lay = _superops(ops, bath1, params, measured=False), _layout(ops.dim)

    def step(x, _):
        return _master_cols(x, sup, lay, dt, method, True)

    return _run(rho0, ops, step, [None] * steps, dt, stride)
