"""Experiment orchestration behind the command-line front end.

:func:`run` executes one :class:`~.config.RunConfig`, writes a CSV with one row
per grid point ``k dt`` (``k = 0 .. floor(t_final/dt)``) and a plain-text
summary next to it, and returns both.  CSV values use ``%.16e`` (17
significant digits), so identical configurations give byte-identical files.

Base columns are ``t,re_alpha,im_alpha,re_zeta,im_zeta,nu,dx2,dp2``; the
schemes append:

==================  =========================================================
single-homodyne     ``dy`` (photocurrent increment over the preceding step)
double-homodyne     ``dy1,dy2``
apriori             nothing
riccati-mfd         ``mfd_rk4_dev``; state columns hold the matrix-fraction
                    covariance and the noise-free mean
oracle-check        ``purity``, ``dy`` or ``dy1,dy2``, then ``oracle_*`` copies
                    of the seven state columns; base columns are the filter
ensemble            ``se_re_alpha,se_im_alpha,apriori_re_alpha,apriori_im_alpha``;
                    base columns are the mixture moments
==================  =========================================================
"""

from __future__ import annotations

import math
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .apriori import AprioriSolution, EnsembleAccumulator, apriori_asymptote
from .config import RunConfig
from .double import DoubleHomodyneConfig, simulate_batch_double, stationary_state_double
from .double import _covariances as _double_covariances
from .errors import ConfigError, DetunedSystem
from .fock import build_operators, gaussian_state, run_sme_double, run_sme_single
from .gaussian import GaussianMoments, kappa
from .single import (
    SingleHomodyneConfig,
    build_riccati,
    covariance_matrix,
    integrate_covariance,
    riccati_rhs,
    simulate_batch,
    solve_riccati_mfd,
    stationary_state,
)
from .single import _covariances as _single_covariances
from .trajectory import n_steps, time_grid

__all__ = ["RunResult", "run", "worker_count", "BASE_COLUMNS"]

BASE_COLUMNS = ["t", "re_alpha", "im_alpha", "re_zeta", "im_zeta", "nu", "dx2", "dp2"]
MFD_RK4_TOL = 1e-8
ENSEMBLE_CHUNK = 50
ENSEMBLE_CHECKPOINTS = 10

_path_locks: dict[str, threading.Lock] = {}
_locks_guard = threading.Lock()


@dataclass
class RunResult:
    csv_path: Path
    summary_path: Path
    summary: str
    columns: list
    data: np.ndarray


def worker_count() -> int:
    """Worker threads for ensembles: ``ST_THREADS`` if set, else ``min(4, cpus)``."""
    env = os.environ.get("ST_THREADS")
    if env is None or env.strip() == "":
        return max(1, min(4, os.cpu_count() or 1))
    try:
        n = int(env)
    except ValueError:
        raise ConfigError(f"ST_THREADS must be a positive integer, got {env!r}") from None
    if n < 1:
        raise ConfigError(f"ST_THREADS must be a positive integer, got {env!r}")
    return n


def _state_columns(t, alpha, zeta, nu):
    zeta = np.broadcast_to(zeta, np.shape(t))
    nu = np.broadcast_to(nu, np.shape(t))
    return [t, alpha.real, alpha.imag, zeta.real, zeta.imag, nu,
            1.0 + 2.0 * nu + 2.0 * zeta.real, 1.0 + 2.0 * nu - 2.0 * zeta.real]


def _distance(final: GaussianMoments, target: GaussianMoments) -> float:
    return max(abs(final.alpha - target.alpha), abs(final.zeta - target.zeta),
               abs(final.nu - target.nu))


def _fmt(z) -> str:
    z = complex(z)
    if z.imag == 0:
        return f"{z.real:.10g}"
    return f"{z.real:.10g}{z.imag:+.10g}i"


def _state_line(label: str, g: GaussianMoments) -> str:
    return f"{label}: alpha={_fmt(g.alpha)} zeta={_fmt(g.zeta)} nu={g.nu:.10g}"


def _asymptote_lines(final: GaussianMoments, target_fn, label: str) -> list:
    try:
        target = target_fn()
    except DetunedSystem as exc:
        return [f"{label}: not available ({exc})"]
    return [_state_line(label, target),
            f"distance to {label}: {_distance(final, target):.6e}"]


def _zscore(diff, se):
    # A component with no Monte Carlo spread is deterministic: it must match exactly.
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.abs(diff) / se
    exact = np.abs(diff) <= 1e-12 * (1.0 + np.abs(diff))
    return np.where(se > 0, z, np.where(exact, 0.0, np.inf))


def _single_cfg(cfg: RunConfig) -> SingleHomodyneConfig:
    return SingleHomodyneConfig(cfg.bath1, cfg.params, cfg.init, cfg.t_final, cfg.dt, cfg.seed)


def _double_cfg(cfg: RunConfig) -> DoubleHomodyneConfig:
    return DoubleHomodyneConfig(cfg.bath1, cfg.field2, cfg.params, cfg.init,
                                cfg.t_final, cfg.dt, cfg.seed)


def _run_single(cfg):
    rec = simulate_batch(_single_cfg(cfg), [0])[0]
    cols = _state_columns(rec.t, rec.alpha, rec.zeta, rec.nu) + [rec.outputs]
    final = GaussianMoments(rec.alpha[-1], rec.zeta[-1], rec.nu[-1])
    lines = _asymptote_lines(final, lambda: stationary_state(cfg.bath1, cfg.params),
                             "stationary state")
    return BASE_COLUMNS + ["dy"], cols, final, lines


def _run_double(cfg):
    rec = simulate_batch_double(_double_cfg(cfg), [0])[0]
    cols = _state_columns(rec.t, rec.alpha, rec.zeta, rec.nu) + [rec.outputs[:, 0],
                                                                rec.outputs[:, 1]]
    final = GaussianMoments(rec.alpha[-1], rec.zeta[-1], rec.nu[-1])
    lines = _asymptote_lines(final, lambda: stationary_state_double(cfg.bath1, cfg.params),
                             "stationary state")
    return BASE_COLUMNS + ["dy1", "dy2"], cols, final, lines


def _run_apriori(cfg):
    t = time_grid(cfg.t_final, cfg.dt)
    alpha, zeta, nu = AprioriSolution(cfg.init, cfg.bath1, cfg.params).series(t)
    final = GaussianMoments(alpha[-1], zeta[-1], nu[-1])
    lines = _asymptote_lines(final, lambda: apriori_asymptote(cfg.bath1, cfg.params),
                             "a priori asymptote")
    return BASE_COLUMNS, _state_columns(t, alpha, zeta, nu), final, lines


def _run_riccati(cfg):
    steps = n_steps(cfg.t_final, cfg.dt)
    t = time_grid(cfg.t_final, cfg.dt)
    zeta_rk, nu_rk = integrate_covariance(
        lambda z, v: riccati_rhs(z, v, cfg.bath1, cfg.params),
        cfg.init.zeta, cfg.init.nu, cfg.dt, steps,
    )
    system = build_riccati(cfg.bath1, cfg.params)
    z0 = covariance_matrix(cfg.init.zeta, cfg.init.nu)
    zeta = np.empty(len(t), complex)
    nu = np.empty(len(t))
    for k, tk in enumerate(t):
        z = solve_riccati_mfd(system, z0, float(tk))
        zeta[k], nu[k] = z[0, 1], z[0, 0].real
    dev = np.maximum(np.abs(zeta - zeta_rk), np.abs(nu - nu_rk))
    alpha = AprioriSolution(cfg.init, cfg.bath1, cfg.params).series(t)[0]
    final = GaussianMoments(alpha[-1], zeta[-1], nu[-1])
    worst = float(dev.max())
    lines = [
        f"max |MFD - RK4|: {worst:.6e}",
        f"MFD and RK4 agree to {MFD_RK4_TOL:g}: {'yes' if worst <= MFD_RK4_TOL else 'no'}",
    ] + _asymptote_lines(final, lambda: stationary_state(cfg.bath1, cfg.params),
                         "stationary state")
    return BASE_COLUMNS + ["mfd_rk4_dev"], _state_columns(t, alpha, zeta, nu) + [dev], final, lines


def _run_oracle(cfg):
    ops = build_operators(cfg.dim)
    rho0 = gaussian_state(cfg.init, cfg.dim)
    if cfg.is_double:
        rec = simulate_batch_double(_double_cfg(cfg), [0])[0]
        orc = run_sme_double(rho0, ops, cfg.bath1, cfg.field2, cfg.params,
                             rec.innovations[1:], cfg.dt, scheme=cfg.oracle_scheme)
        extra_names = ["dy1", "dy2"]
        extra = [rec.outputs[:, 0], rec.outputs[:, 1]]
    else:
        rec = simulate_batch(_single_cfg(cfg), [0])[0]
        dw = rec.innovations[1:] / math.sqrt(kappa(cfg.bath1, cfg.params.theta))
        orc = run_sme_single(rho0, ops, cfg.bath1, cfg.params, dw, cfg.dt,
                             scheme=cfg.oracle_scheme)
        extra_names = ["dy"]
        extra = [rec.outputs]
    filt = _state_columns(rec.t, rec.alpha, rec.zeta, rec.nu)
    oracle = _state_columns(rec.t, orc.alpha, orc.zeta, orc.nu)[1:]
    names = (BASE_COLUMNS + ["purity"] + extra_names
             + ["oracle_" + c for c in BASE_COLUMNS[1:]])
    cols = filt + [orc.purity] + extra + oracle
    final = GaussianMoments(rec.alpha[-1], rec.zeta[-1], rec.nu[-1])
    lines = [
        f"measurement: {cfg.measurement}",
        f"fock_dim: {cfg.dim}",
        f"oracle scheme: {cfg.oracle_scheme}",
        _state_line("oracle final state", GaussianMoments(orc.alpha[-1], orc.zeta[-1], orc.nu[-1])),
        f"max |alpha_filter - alpha_oracle|: {np.max(np.abs(rec.alpha - orc.alpha)):.6e}",
        f"max |zeta_filter - zeta_oracle|: {np.max(np.abs(rec.zeta - orc.zeta)):.6e}",
        f"max |nu_filter - nu_oracle|: {np.max(np.abs(rec.nu - orc.nu)):.6e}",
        f"max |dx2_filter - dx2_oracle|: {np.max(np.abs(rec.dx2 - orc.dx2)):.6e}",
        f"min oracle purity: {float(np.min(orc.purity)):.10g}",
        f"min oracle eigenvalue: {orc.min_eig:.3e}",
    ]
    return names, cols, final, lines


def _run_ensemble(cfg):
    m = cfg.trajectories
    if cfg.is_double:
        sim_cfg = _double_cfg(cfg)
        steps = n_steps(cfg.t_final, cfg.dt)
        cov = _double_covariances(sim_cfg, steps)
        simulate = simulate_batch_double
    else:
        sim_cfg = _single_cfg(cfg)
        steps = n_steps(cfg.t_final, cfg.dt)
        cov = _single_covariances(sim_cfg, steps)
        simulate = simulate_batch

    def chunk(lo):
        acc = EnsembleAccumulator()
        for rec in simulate(sim_cfg, range(lo, min(lo + ENSEMBLE_CHUNK, m)), covariances=cov):
            acc.add(rec)
        return acc

    starts = list(range(0, m, ENSEMBLE_CHUNK))
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        parts = list(pool.map(chunk, starts))
    # merge in index order so the floating-point sums do not depend on scheduling
    total = EnsembleAccumulator()
    for part in parts:
        total.merge(part)
    ens = total.result()

    t = ens.t
    ap_alpha = AprioriSolution(cfg.init, cfg.bath1, cfg.params).series(t)[0]
    cols = _state_columns(t, ens.alpha, ens.zeta, ens.nu) + [
        ens.alpha_stderr.real, ens.alpha_stderr.imag, ap_alpha.real, ap_alpha.imag]
    names = BASE_COLUMNS + ["se_re_alpha", "se_im_alpha", "apriori_re_alpha", "apriori_im_alpha"]

    idx = np.linspace(0, len(t) - 1, ENSEMBLE_CHECKPOINTS + 1).round().astype(int)[1:]
    diff = ens.alpha[idx] - ap_alpha[idx]
    se = ens.alpha_stderr[idx]
    z = np.maximum(_zscore(diff.real, se.real), _zscore(diff.imag, se.imag))
    inside = int(np.sum(z <= 3.0))
    final = GaussianMoments(ens.alpha[-1], ens.zeta[-1], ens.nu[-1])
    lines = [
        f"measurement: {cfg.measurement}",
        f"trajectories: {m}",
        f"|mean alpha - apriori alpha| at t_final: {abs(diff[-1]):.6e}",
        f"3-sigma Monte Carlo band at t_final: re +/-{3 * se[-1].real:.6e}, im +/-{3 * se[-1].imag:.6e}",
        f"checkpoints within 3 sigma: {inside}/{len(idx)}",
        f"largest checkpoint deviation (standard errors): {float(np.max(z)):.4f}",
    ] + _asymptote_lines(final, lambda: apriori_asymptote(cfg.bath1, cfg.params),
                         "a priori asymptote")
    return names, cols, final, lines


_DISPATCH = {
    "single-homodyne": _run_single,
    "double-homodyne": _run_double,
    "apriori": _run_apriori,
    "riccati-mfd": _run_riccati,
    "oracle-check": _run_oracle,
    "ensemble": _run_ensemble,
}


def _lock_for(path: Path) -> threading.Lock:
    key = str(path.resolve())
    with _locks_guard:
        return _path_locks.setdefault(key, threading.Lock())


def _write_csv(path: Path, names, data: np.ndarray) -> None:
    lines = [",".join(names)]
    lines += [",".join("%.16e" % v for v in row) for row in data]
    text = "\n".join(lines) + "\n"
    with _lock_for(path):
        with open(path, "w", encoding="ascii", newline="") as fh:
            fh.write(text)


def run(cfg: RunConfig, out: Optional[str | os.PathLike] = None) -> RunResult:
    """Execute ``cfg`` and write ``<out>`` (CSV) and ``<out stem>.summary.txt``.

    The CSV path is ``out``, else ``cfg.output_path``, else ``<scheme>.csv``.
    Library errors propagate unchanged; ``OSError`` signals an I/O failure.
    """
    path = Path(out if out is not None else (cfg.output_path or f"{cfg.scheme}.csv"))
    start = time.perf_counter()
    names, cols, final, lines = _DISPATCH[cfg.scheme](cfg)
    data = np.column_stack([np.asarray(c, dtype=float) for c in cols])
    wall = time.perf_counter() - start

    summary = "\n".join(
        [
            f"scheme: {cfg.scheme}",
            f"seed: {cfg.seed}",
            f"dt: {cfg.dt!r}",
            f"t_final: {cfg.t_final!r}",
            f"rows: {data.shape[0]}",
            _state_line("final state", final),
        ]
        + lines
        + [f"wall time: {wall:.3f} s", f"csv: {path}"]
    ) + "\n"
    _write_csv(path, names, data)
    summary_path = path.with_suffix(".summary.txt")
    with _lock_for(summary_path):
        summary_path.write_text(summary, encoding="utf-8")
    return RunResult(path, summary_path, summary, names, data)
