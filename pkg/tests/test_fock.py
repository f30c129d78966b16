import logging
import math

import numpy as np
import pytest

from squeezed_trajectories import (
    AprioriSolution,
    BathSpec,
    GaussianMoments,
    ModelParams,
    TruncationLeak,
    kappa,
    pure_squeezed_bath,
)
from squeezed_trajectories.fock import (
    build_operators,
    coherent_state,
    double_gain_operators,
    extract_moments,
    gaussian_state,
    master_rhs,
    master_step,
    min_eigenvalue,
    run_master,
    run_sme_double,
    run_sme_single,
    single_gain_operator,
    sme_step_double,
    sme_step_single,
    suggest_dim,
    thermal_state,
)

from .conftest import random_bath, random_params


def comm(x, y):
    return x @ y - y @ x


def literal_master(rho, ops, b, p):
    """The deterministic part of the filtering equations, line by line."""
    a, ad = ops.a, ops.ad
    mu, n, m, beta = p.mu, b.n, b.m, b.beta
    return (
        -1j * comm(p.delta * ad @ a, rho)
        + math.sqrt(mu) * comm(a, rho) * np.conj(beta)
        + math.sqrt(mu) * comm(rho, ad) * beta
        + mu / 2 * (n + 1) * (comm(a @ rho, ad) + comm(a, rho @ ad))
        + mu / 2 * n * (comm(ad @ rho, a) + comm(ad, rho @ a))
        - mu / 2 * np.conj(m) * (comm(a @ rho, a) + comm(a, rho @ a))
        - mu / 2 * m * (comm(ad @ rho, ad) + comm(ad, rho @ ad))
    )


def literal_single_gain(rho, ops, b, p):
    a, ad = ops.a, ops.ad
    e = p.phase
    ea = np.trace(a @ rho)
    ead = np.trace(ad @ rho)
    return math.sqrt(p.mu) / kappa(b, p.theta) * (
        e * a @ rho + np.conj(e) * rho @ ad - (e * ea + np.conj(e) * ead) * rho
        + (e * b.n + np.conj(e) * np.conj(b.m)) * comm(a, rho)
        + (np.conj(e) * b.n + e * b.m) * comm(rho, ad)
    )


def literal_double_gains(rho, ops, b1, b2, p):
    a, ad = ops.a, ops.ad
    n, m = b1.n, b1.m
    ea, ead = np.trace(a @ rho), np.trace(ad @ rho)
    j1 = (a @ rho + ad @ rho - ea * rho - ead * rho
          + (n + np.conj(m)) * comm(a, rho) + (n + m + 1) * comm(rho, ad))
    j2 = (a @ rho - ad @ rho - ea * rho + ead * rho
          + (n - np.conj(m)) * comm(a, rho) - (n - m + 1) * comm(rho, ad))
    d = (1 + n + b2.n) ** 2 - (m.real + b2.m.real) ** 2 - (m.imag - b2.m.imag) ** 2
    s = 1 + n + b2.n
    mp = m.real + b2.m.real
    q = m.imag - b2.m.imag
    k1 = math.sqrt(2 * p.mu) / (2 * d) * ((s - mp) * j1 + 1j * q * j2)
    k2 = math.sqrt(2 * p.mu) / (2 * d * 1j) * ((s + mp) * j2 - 1j * q * j1)
    return k1, k2


def random_density(rng, dim, rank=3):
    v = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    v[dim // 2:] *= 1e-3  # keep the top levels nearly empty
    rho = v @ v.conj().T
    return rho / np.trace(rho).real


class TestOperators:
    def test_two_level(self):
        assert np.array_equal(build_operators(2).a, np.array([[0, 1], [0, 0]]))

    def test_matrix_element(self):
        assert build_operators(10).a[3, 4] == pytest.approx(2.0)

    def test_commutator_on_lower_block(self):
        ops = build_operators(12)
        c = comm(ops.a, ops.ad)
        assert np.allclose(c[:-1, :-1], np.eye(11), atol=1e-14)

    def test_shift_products_match_matmul(self, rng):
        ops = build_operators(7)
        x = rng.normal(size=(2, 7, 7)) + 1j * rng.normal(size=(2, 7, 7))
        assert np.allclose(ops.a_left(x), ops.a @ x, atol=1e-15)
        assert np.allclose(ops.ad_left(x), ops.ad @ x, atol=1e-15)
        assert np.allclose(ops.a_right(x), x @ ops.a, atol=1e-15)
        assert np.allclose(ops.ad_right(x), x @ ops.ad, atol=1e-15)

    def test_too_small(self):
        with pytest.raises(ValueError):
            build_operators(1)

    def test_suggest_dim(self):
        assert suggest_dim(GaussianMoments()) == 10
        assert suggest_dim(GaussianMoments(2.0, 0, 0.5)) > 20


class TestCompactForms:
    def test_master_matches_literal(self, rng):
        ops = build_operators(12)
        for _ in range(20):
            b, p = random_bath(rng), random_params(rng)
            rho = random_density(rng, 12)
            assert np.max(np.abs(master_rhs(rho, ops, b, p) - literal_master(rho, ops, b, p))) < 1e-12

    def test_single_gain_matches_literal(self, rng):
        ops = build_operators(12)
        for _ in range(20):
            b, p = random_bath(rng), random_params(rng)
            rho = random_density(rng, 12)
            got = single_gain_operator(rho, ops, b, p)
            assert np.max(np.abs(got - literal_single_gain(rho, ops, b, p))) < 1e-12

    def test_sparse_superoperators_match_dense(self, rng):
        from squeezed_trajectories.fock import _superops, _from_cols, _to_cols

        ops = build_operators(12)
        for _ in range(5):
            b1, b2, p = random_bath(rng), random_bath(rng), random_params(rng)
            rho = np.stack([random_density(rng, 12) for _ in range(2)])
            x = _to_cols(rho)
            single = _superops(ops, b1, p)
            double = _superops(ops, b1, p, b2)
            drift = _from_cols(single.drift @ x, rho.shape)
            assert np.max(np.abs(drift - master_rhs(rho, ops, b1, p))) < 1e-12
            b = _from_cols(single.gains[0] @ x, rho.shape)
            g = b - np.trace(b, axis1=1, axis2=2)[:, None, None] * rho
            assert np.max(np.abs(g - single_gain_operator(rho, ops, b1, p))) < 1e-12
            for sparse, dense in zip(double.gains, double_gain_operators(rho, ops, b1, b2, p)):
                b = _from_cols(sparse @ x, rho.shape)
                g = b - np.trace(b, axis1=1, axis2=2)[:, None, None] * rho
                assert np.max(np.abs(g - dense)) < 1e-12

    def test_double_gains_match_literal(self, rng):
        ops = build_operators(12)
        for _ in range(20):
            b1, b2, p = random_bath(rng), random_bath(rng), random_params(rng)
            rho = random_density(rng, 12)
            k1, k2 = double_gain_operators(rho, ops, b1, b2, p)
            l1, l2 = literal_double_gains(rho, ops, b1, b2, p)
            assert np.max(np.abs(k1 - l1)) < 1e-12 and np.max(np.abs(k2 - l2)) < 1e-12
            # both gain operators are Hermitian and traceless
            for k in (k1, k2):
                assert np.allclose(k, k.conj().T, atol=1e-12)
                assert abs(np.trace(k)) < 1e-12

    def test_batched(self, rng):
        ops = build_operators(8)
        b, p = random_bath(rng), random_params(rng)
        rhos = np.stack([random_density(rng, 8) for _ in range(3)])
        out = master_rhs(rhos, ops, b, p)
        assert np.allclose(out[1], master_rhs(rhos[1], ops, b, p), atol=1e-14)
        g = single_gain_operator(rhos, ops, b, p)
        assert np.allclose(g[2], single_gain_operator(rhos[2], ops, b, p), atol=1e-14)


class TestSteps:
    def test_vacuum_fixed_point(self):
        ops = build_operators(10)
        rho = coherent_state(0, 10)
        assert np.max(np.abs(master_rhs(rho, ops, BathSpec(), ModelParams(0.8, 1.3, 0.2)))) == 0
        new = sme_step_single(rho, ops, BathSpec(), ModelParams(0.8, 1.3, 0.2), 0.3, 1e-3)
        assert np.array_equal(new, rho)

    def test_zero_noise_is_master_euler(self, rng):
        ops = build_operators(10)
        b, p = random_bath(rng, n_max=0.3), random_params(rng)
        rho = random_density(rng, 10)
        a = sme_step_single(rho, ops, b, p, 0.0, 1e-3, check_leak=False)
        c = master_step(rho, ops, b, p, 1e-3, method="euler", check_leak=False)
        assert np.array_equal(a, c)
        d = sme_step_double(rho, ops, b, BathSpec(), p, np.zeros(2), 1e-3, check_leak=False)
        assert np.array_equal(d, c)

    def test_thermal_fixed_point(self):
        ops = build_operators(30)
        b, p = BathSpec(0.4, 0), ModelParams(0, 1.0)
        rho = thermal_state(0.4, 30)
        before = extract_moments(rho, ops)
        after = extract_moments(master_step(rho, ops, b, p, 1e-3), ops)
        assert max(abs(x - y) for x, y in zip(before[:3], after[:3])) < 1e-10

    def test_truncation_leak(self):
        ops = build_operators(10)
        with pytest.raises(TruncationLeak):
            master_step(coherent_state(2.5, 10), ops, BathSpec(), ModelParams(), 1e-3)

    def test_unknown_methods(self):
        ops = build_operators(4)
        with pytest.raises(ValueError):
            master_step(coherent_state(0, 4), ops, BathSpec(), ModelParams(), 1e-3, method="rk2")
        with pytest.raises(ValueError):
            sme_step_single(coherent_state(0, 4), ops, BathSpec(), ModelParams(), 0.0, 1e-3, scheme="heun")


class TestStates:
    def test_vacuum_moments(self):
        ops = build_operators(10)
        assert np.allclose(extract_moments(coherent_state(0, 10), ops), (0, 0, 0, 1), atol=1e-15)

    def test_coherent_moments(self):
        ops = build_operators(30)
        a, z, n, pur = extract_moments(coherent_state(0.5, 30), ops)
        assert abs(a - 0.5) < 1e-10 and abs(z) < 1e-10 and abs(n) < 1e-10
        assert pur == pytest.approx(1.0)

    def test_thermal_moments(self):
        ops = build_operators(30)
        a, z, n, pur = extract_moments(thermal_state(0.3, 30), ops)
        assert n == pytest.approx(0.3, abs=1e-12)
        assert pur == pytest.approx(1 / 1.6, abs=1e-12)

    @pytest.mark.parametrize("g", [
        GaussianMoments(0.3 - 0.2j, 0.2 + 0.1j, 0.4),
        GaussianMoments.squeezed(0.4, 1.0, 0.2j, 0.1),
        GaussianMoments.squeezed(0.3, -0.5, 0.5),
    ])
    def test_gaussian_state(self, g):
        ops = build_operators(30)
        rho = gaussian_state(g, 30)
        a, z, n, _ = extract_moments(rho, ops)
        assert abs(a - g.alpha) < 1e-8 and abs(z - g.zeta) < 1e-8 and abs(n - g.nu) < 1e-8
        assert min_eigenvalue(rho) > -1e-12

    def test_gaussian_state_rejects_unphysical(self):
        with pytest.raises(ValueError):
            gaussian_state(GaussianMoments(0, 1.0, 0.1), 10)


class TestOracleRuns:
    def test_master_matches_closed_form(self):
        ops = build_operators(30)
        b, p = BathSpec(0.3, 0.2 + 0.1j, 0.4 - 0.2j), ModelParams(0.6, 1.0)
        g0 = GaussianMoments(0.8 + 0.5j)
        run = run_master(gaussian_state(g0, 30), ops, b, p, 1e-3, 5000, stride=250)
        a, z, n = AprioriSolution(g0, b, p).series(run.t)
        assert np.max(np.abs(run.alpha - a)) < 1e-6
        assert np.max(np.abs(run.zeta - z)) < 1e-6
        assert np.max(np.abs(run.nu - n)) < 1e-6

    def test_coherent_input_keeps_coherent_state(self):
        # Exactly coherent in continuous time; the Euler drift leaves an O(dt) residue.
        ops = build_operators(30)
        b, p = BathSpec(0, 0, 0.5), ModelParams(0.3, 1.0, 0.2)
        dw = np.random.default_rng(1).normal(scale=math.sqrt(5e-4), size=6000)
        residue = []
        for f, dt in ((2, 1e-3), (1, 5e-4)):
            inc = dw.reshape(-1, f).sum(axis=1)
            run = run_sme_single(coherent_state(0.6, 30), ops, b, p, inc, dt, stride=100 // f,
                                 scheme="milstein")
            residue.append(max(np.max(np.abs(run.zeta)), np.max(np.abs(run.nu))))
            assert np.min(run.purity) > 1 - 1e-6
        assert residue[0] < 0.5 * 1e-3 and residue[1] < 0.5 * 5e-4
        assert 1.7 < residue[0] / residue[1] < 2.3

    def test_pure_fields_preserve_purity_double(self):
        ops = build_operators(30)
        b1, b2 = pure_squeezed_bath(0.25, 0.7, 0.3), pure_squeezed_bath(0.1, -0.4)
        p = ModelParams(0.2, 1.0)
        cov_l = np.linalg.cholesky(np.array([[1 + 0.35 + b1.m.real + b2.m.real, b1.m.imag - b2.m.imag],
                                             [b1.m.imag - b2.m.imag, 1 + 0.35 - b1.m.real - b2.m.real]]))
        dt = 1e-3
        dy = np.random.default_rng(2).normal(size=(5000, 2)) @ cov_l.T * math.sqrt(dt)
        run = run_sme_double(coherent_state(0.3, 30), ops, b1, b2, p, dy, dt, stride=50,
                             scheme="milstein")
        assert np.min(run.purity) >= 1 - 1e-3
        # Euler-Maruyama on the same path drifts further from purity.
        euler = run_sme_double(coherent_state(0.3, 30), ops, b1, b2, p, dy, dt, stride=50)
        assert np.min(euler.purity) < np.min(run.purity)

    def test_thermal_field_loses_purity_double(self):
        ops = build_operators(30)
        b1, p, dt = BathSpec(0.5, 0), ModelParams(0.0, 1.0), 1e-3
        dy = np.random.default_rng(3).normal(size=(1000, 2)) * math.sqrt(2.5 * dt)
        run = run_sme_double(coherent_state(0.3, 30), ops, b1, BathSpec(), p, dy, dt, stride=100)
        assert run.purity[-1] < 0.99

    def test_negative_eigenvalue_logged(self, caplog):
        ops = build_operators(6)
        rho = np.diag([1.2, -0.2, 0, 0, 0, 0]).astype(complex)
        with caplog.at_level(logging.WARNING):
            run = run_master(rho, ops, BathSpec(), ModelParams(), 1e-3, 1)
        assert run.min_eig < 0
        assert "eigenvalue" in caplog.text

    def test_ensemble_of_oracles_averages_to_master(self):
        # The conditional states average to the master-equation state.
        dim, m, dt, steps = 14, 600, 2e-3, 500
        ops = build_operators(dim)
        b, p = BathSpec(0.2, 0.1 + 0.1j, 0.3), ModelParams(0.4, 1.0, 0.5)
        rho0 = gaussian_state(GaussianMoments(0.4 + 0.2j), dim)
        dw = np.random.default_rng(9).normal(scale=math.sqrt(dt), size=(steps, m))
        cond = run_sme_single(np.broadcast_to(rho0, (m, dim, dim)), ops, b, p, dw, dt, stride=steps)
        ref = run_master(rho0, ops, b, p, dt, steps, stride=steps, method="euler")
        alphas = cond.alpha[-1]
        se = np.std(alphas.real, ddof=1) / math.sqrt(m) + 1j * np.std(alphas.imag, ddof=1) / math.sqrt(m)
        d = alphas.mean() - ref.alpha[-1]
        assert abs(d.real) < 3 * se.real and abs(d.imag) < 3 * se.imag
        mixture = cond.rho.mean(axis=0)
        assert np.max(np.abs(mixture - ref.rho)) < 0.02


def _strong_errors(run, dim, t_final, fine_dt, factors, seed, double=False):
    """Final-``alpha`` deviations of coarse runs from a fine run on matched paths."""
    ops = build_operators(dim)
    steps = int(round(t_final / fine_dt))
    rng = np.random.default_rng(seed)
    shape = (steps, 2) if double else (steps,)
    fine_inc = rng.normal(scale=math.sqrt(fine_dt), size=shape)
    ref = run(ops, fine_inc, fine_dt, steps).alpha[-1]
    errs = []
    for f in factors:
        coarse = fine_inc.reshape((steps // f, f) + shape[1:]).sum(axis=1)
        errs.append(abs(run(ops, coarse, fine_dt * f, steps // f).alpha[-1] - ref))
    return np.array(errs)


class TestMilstein:
    b, p = BathSpec(0.2, 0.1 + 0.1j, 0.5), ModelParams(0.3, 1.0, 0.4)

    def test_unknown_scheme(self):
        ops = build_operators(6)
        rho = coherent_state(0.1, 6)
        with pytest.raises(ValueError):
            sme_step_single(rho, ops, BathSpec(), ModelParams(), 0.0, 1e-3, scheme="heun")
        with pytest.raises(ValueError):
            sme_step_double(rho, ops, BathSpec(), BathSpec(), ModelParams(), np.zeros(2), 1e-3,
                            scheme="heun")

    def test_zero_noise_matches_euler_up_to_ito_term(self, rng):
        # With dY = 0 the correction is -(kappa dt / 2) G'[G], so the schemes differ at O(dt).
        ops = build_operators(12)
        rho = gaussian_state(GaussianMoments(0.3 + 0.1j, 0.05, 0.1), 12)
        e = sme_step_single(rho, ops, self.b, self.p, 0.0, 1e-4, check_leak=False)
        m = sme_step_single(rho, ops, self.b, self.p, 0.0, 1e-4, check_leak=False, scheme="milstein")
        assert 0 < np.max(np.abs(e - m)) < 1e-3

    def test_single_strong_order_one(self):
        def run(ops, dw, dt, steps):
            return run_sme_single(coherent_state(0.5 + 0.2j, 20), ops, self.b, self.p, dw, dt,
                                  stride=steps, scheme="milstein")

        errs = _strong_errors(run, 20, 0.5, 2.5e-5, (4, 8, 16), seed=4)
        ratios = errs[1:] / errs[:-1]
        assert np.all(ratios > 1.6) and np.all(ratios < 2.6)

    def test_double_strong_order_one(self):
        b2 = BathSpec(0.1, -0.05j)

        def run(ops, dy, dt, steps):
            return run_sme_double(coherent_state(0.5 + 0.2j, 20), ops, self.b, b2, self.p, dy, dt,
                                  stride=steps, scheme="milstein")

        errs = _strong_errors(run, 20, 0.5, 2.5e-5, (4, 8, 16), seed=5, double=True)
        ratios = errs[1:] / errs[:-1]
        assert np.all(ratios > 1.6) and np.all(ratios < 2.6)
