import math

import numpy as np
import pytest

from squeezed_trajectories import (
    AprioriSolution,
    BathSpec,
    EnsembleAccumulator,
    GaussianMoments,
    GridMismatch,
    ModelParams,
    SingleHomodyneConfig,
    apriori_asymptote,
    apriori_closed_form,
    apriori_rhs,
    ensemble_average,
    simulate_batch,
    simulate_trajectory,
    stationary_state,
    stationary_state_double,
)

from .conftest import random_bath, random_params, random_state_cov


def test_t0_returns_init():
    g = GaussianMoments(0.3 + 0.2j, 0.1, 0.4)
    assert apriori_closed_form(g, BathSpec(0.2, 0.1, 1), ModelParams(0.5, 1), 0.0) is g


def test_asymptote_substitution():
    g = apriori_asymptote(BathSpec(0.5, 0.5), ModelParams(1.0, 2.0))
    assert g.zeta == pytest.approx(0.25 - 0.25j, abs=1e-15)


def test_resonant_states_coincide():
    b, p = BathSpec(0.5, 0.3 + 0.2j, 1.0), ModelParams(0, 4)
    a = apriori_asymptote(b, p)
    for g in (stationary_state(b, p), stationary_state_double(b, p)):
        assert abs(a.alpha - g.alpha) < 1e-12 and abs(a.zeta - g.zeta) < 1e-12 and abs(a.nu - g.nu) < 1e-12
    assert a.alpha == pytest.approx(-1, abs=1e-15)


def test_fixed_point_is_stationary(rng):
    for _ in range(20):
        b, p = random_bath(rng), random_params(rng)
        d = apriori_rhs(apriori_asymptote(b, p), b, p)
        assert max(abs(x) for x in d) < 1e-14


def test_vacuum_rhs():
    assert apriori_rhs(GaussianMoments(), BathSpec(), ModelParams(0.3, 1)) == (0, 0, 0)


def test_closed_form_matches_rk4(rng):
    for _ in range(10):
        b, p = random_bath(rng), random_params(rng)
        zeta0, nu0 = random_state_cov(rng)
        g0 = GaussianMoments(complex(*rng.uniform(-1, 1, 2)), zeta0, nu0)
        dt = 1e-3 / p.mu
        steps = int(round(10 / p.mu / dt))

        def rhs(y):
            d = apriori_rhs(GaussianMoments(y[0], y[1], y[2].real), b, p)
            return np.array(d, dtype=complex)

        y = np.array([g0.alpha, g0.zeta, g0.nu], dtype=complex)
        sol = AprioriSolution(g0, b, p)
        worst = 0.0
        for k in range(steps):
            k1 = rhs(y)
            k2 = rhs(y + 0.5 * dt * k1)
            k3 = rhs(y + 0.5 * dt * k2)
            k4 = rhs(y + dt * k3)
            y = y + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
            if (k + 1) % 500 == 0:
                g = sol((k + 1) * dt)
                worst = max(worst, abs(y[0] - g.alpha), abs(y[1] - g.zeta), abs(y[2] - g.nu))
        assert worst < 1e-10


def test_series_matches_call():
    sol = AprioriSolution(GaussianMoments(0.5, 0.1j, 0.2), BathSpec(0.3, 0.1, 0.2j), ModelParams(0.4, 1.2))
    t = np.array([0.0, 0.5, 2.0])
    a, z, n = sol.series(t)
    for k, tk in enumerate(t):
        g = sol(tk)
        assert abs(a[k] - g.alpha) < 1e-15 and abs(z[k] - g.zeta) < 1e-15 and abs(n[k] - g.nu) < 1e-15


def test_zero_gain_trajectory_is_apriori_mean():
    # Coherent field, coherent state: the gain vanishes and the conditional mean
    # is the Euler discretisation of the a priori mean; it converges at order 1.
    b, p, g0 = BathSpec(0, 0, 0.6 + 0.2j), ModelParams(0.7, 1.0), GaussianMoments(0.4 - 0.3j)
    errs = []
    for dt in (2e-3, 1e-3):
        rec = simulate_trajectory(SingleHomodyneConfig(b, p, g0, 3.0, dt, seed=4))
        a, z, n = AprioriSolution(g0, b, p).series(rec.t)
        assert np.all(rec.zeta == 0) and np.all(rec.nu == 0) and np.all(z == 0) and np.all(n == 0)
        errs.append(np.max(np.abs(rec.alpha - a)))
    assert errs[0] < 1e-3
    assert errs[0] / errs[1] == pytest.approx(2.0, rel=0.02)


def squeezed_ensemble(m, seed=2):
    g0 = GaussianMoments(0.5 + 0.5j, -0.3, 0.25)
    cfg = SingleHomodyneConfig(BathSpec(), ModelParams(0.5, 1.0, 0.3), g0, 3.0, 2e-3, seed=seed)
    return cfg, simulate_batch(cfg, range(m))


class TestEnsemble:
    def test_mean_within_three_se(self):
        cfg, recs = squeezed_ensemble(1000)
        ens = ensemble_average(recs)
        a, z, n = AprioriSolution(cfg.init, cfg.bath, cfg.params).series(ens.t)
        idx = np.linspace(0, len(ens.t) - 1, 11).round().astype(int)[1:]
        d = ens.alpha[idx] - a[idx]
        se = ens.alpha_stderr[idx]
        assert np.all(se.real > 0) and np.all(se.imag > 0)
        assert np.all(np.abs(d.real) <= 3 * se.real)
        assert np.all(np.abs(d.imag) <= 3 * se.imag)
        # mixture covariance reproduces the a priori covariance
        assert np.max(np.abs(ens.zeta[idx] - z[idx])) < 0.03
        assert np.max(np.abs(ens.nu[idx] - n[idx])) < 0.03

    def test_mixture_identity(self):
        _, recs = squeezed_ensemble(30)
        ens = ensemble_average(recs)
        alphas = np.array([r.alpha for r in recs])
        k = -1
        mean = alphas[:, k].mean()
        assert ens.zeta[k] == pytest.approx(recs[0].zeta[k] + np.mean(alphas[:, k] ** 2) - mean ** 2)
        assert ens.nu[k] == pytest.approx(recs[0].nu[k] + np.mean(np.abs(alphas[:, k]) ** 2) - abs(mean) ** 2)
        se = np.std(alphas[:, k].real, ddof=1) / math.sqrt(30)
        assert ens.alpha_stderr[k].real == pytest.approx(se)

    def test_merge_equals_single_pass(self):
        _, recs = squeezed_ensemble(20)
        whole = EnsembleAccumulator()
        for r in recs:
            whole.add(r)
        left, right = EnsembleAccumulator(), EnsembleAccumulator()
        for r in recs[:7]:
            left.add(r)
        for r in recs[7:]:
            right.add(r)
        empty = EnsembleAccumulator()
        empty.merge(left)
        empty.merge(right)
        a, b = whole.result(), empty.result()
        assert np.allclose(a.alpha, b.alpha, rtol=1e-14) and np.allclose(a.nu, b.nu, rtol=1e-14)
        assert a.count == b.count == 20

    def test_empty(self):
        with pytest.raises(GridMismatch):
            ensemble_average([])

    def test_grid_mismatch(self):
        _, recs = squeezed_ensemble(1)
        cfg = SingleHomodyneConfig(BathSpec(), ModelParams(), GaussianMoments(), 1.0, 1e-3)
        with pytest.raises(GridMismatch):
            ensemble_average([recs[0], simulate_trajectory(cfg)])
