"""End-to-end acceptance suite.

Each test implements one acceptance criterion at its stated tolerance and
runtime budget and prints a single pass line (visible with ``pytest -s``).
Criteria follow the library's synthetic benchmarks; seeds are fixed so the
suite is deterministic.
"""

import time

import numpy as np
import pytest

from ddrom import conditioning as cond
from ddrom import h2, informativity as inf, irka, loewner, lti


def _report(num, detail, t0, budget):
    elapsed = time.perf_counter() - t0
    print(f"criterion {num:2d} PASS ({detail}) [{elapsed:.1f}s < {budget:.0f}s]")
    assert elapsed < budget


def _random_subunitary(rng, m, n):
    Q, _ = np.linalg.qr(rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n)))
    return Q


def test_criterion_01_condition_number_formula_oracle():
    t0 = time.perf_counter()
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(200):
        m = int(rng.integers(2, 61))
        n = int(rng.integers(1, m))
        Q = _random_subunitary(rng, m, n)
        z = (rng.standard_normal(m) + 1j * rng.standard_normal(m)) * 10.0 ** rng.uniform(-2, 2)
        kappa = cond.condition_number(Q, z).kappa
        sv = np.linalg.svd(np.column_stack([Q, z]), compute_uv=False)
        worst = max(worst, abs(kappa - sv[0] / sv[-1]) / (sv[0] / sv[-1]))
    assert worst < 1e-10
    _report(1, f"200 instances, worst rel diff {worst:.2e}", t0, 10.0)


def test_criterion_02_optimal_scaling_grid_minimum():
    t0 = time.perf_counter()
    rng = np.random.default_rng(102)
    deltas = np.logspace(-6, 6, 50)
    for _ in range(20):
        m = int(rng.integers(4, 41))
        n = int(rng.integers(1, m - 1))
        Q = _random_subunitary(rng, m, n)
        z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        delta_star = cond.optimal_scale(z)

        def kappa_svd(vec):
            sv = np.linalg.svd(np.column_stack([Q, vec]), compute_uv=False)
            return sv[0] / sv[-1]

        kappa_star = kappa_svd(delta_star * z)
        grid_min = min(kappa_svd(d * z) for d in deltas)
        assert kappa_star <= grid_min * (1 + 1e-10)
    _report(2, "20 instances x 50 log-spaced scales", t0, 10.0)


def test_criterion_03_eigenstructure():
    t0 = time.perf_counter()
    rng = np.random.default_rng(103)
    for _ in range(60):
        m = int(rng.integers(4, 61))
        n = int(rng.integers(2, m))
        Q = _random_subunitary(rng, m, n)
        z = rng.standard_normal(m) + 1j * rng.standard_normal(m)
        an = cond.condition_number(Q, z)
        eigs = np.linalg.eigvalsh(Q @ Q.conj().T + np.outer(z, z.conj()))
        nonzero = np.sort(eigs[np.abs(eigs) > 1e-10])
        assert nonzero.shape[0] == n + 1
        assert np.sum(np.abs(nonzero - 1.0) <= 1e-10) >= n - 1
        assert abs(nonzero[-1] - an.lambda_max) <= 1e-10 * an.lambda_max
        assert abs(nonzero[0] - an.lambda_min_nonzero) <= 1e-10 * max(an.lambda_min_nonzero, 1e-300)
    _report(3, "60 randomized instances, n-1 unit eigenvalues plus formula extremes", t0, 10.0)


def test_criterion_04_frequency_recovery(order50_data):
    t0 = time.perf_counter()
    fom, data = order50_data
    ws = inf.build_workspace(data, 100)
    ev = lti.TransferEvaluator(fom)
    worst = {1.0: 0.0, 1.5: 0.0}
    for om in np.linspace(0.01, np.pi - 0.01, 100):
        for shell in (1.0, 1.5):
            sigma = shell * np.exp(1j * om)
            s = inf.recover_value(ws, sigma, with_derivative=True)
            e0 = abs(s.M0 - ev.value(sigma)) / abs(ev.value(sigma))
            e1 = abs(s.M1 - ev.derivative(sigma)) / abs(ev.derivative(sigma))
            worst[shell] = max(worst[shell], e0, e1)
    assert worst[1.0] < 1e-8
    assert worst[1.5] < 1e-8
    _report(4, f"order 50, T=10n, nhat=2n: circle {worst[1.0]:.1e}, |sigma|=1.5 {worst[1.5]:.1e}", t0, 60.0)


def test_criterion_05_working_order_invariance(order50_data):
    t0 = time.perf_counter()
    _, data = order50_data
    ws_n = inf.build_workspace(data, 50)
    ws_2n = inf.build_workspace(data, 100)
    worst = 0.0
    for om in np.linspace(0.01, np.pi - 0.01, 100):
        sigma = np.exp(1j * om)
        a = inf.recover_value(ws_n, sigma).M0
        b = inf.recover_value(ws_2n, sigma).M0
        worst = max(worst, abs(a - b) / abs(b))
    assert worst < 1e-6
    _report(5, f"nhat in {{n, 2n}} pairwise disagreement {worst:.1e}", t0, 60.0)


def test_criterion_06_overflow_fallback():
    t0 = time.perf_counter()
    nhat = 1100
    sigma = 2.0 * np.exp(0.3j)
    assert inf.gamma_vectors(sigma, nhat)[0].norm.overflows  # |sigma|^nhat > double max
    fom = lti.random_stable_system(50, 0.8, seed=11)
    data = lti.simulate(fom, np.random.default_rng(5).standard_normal(2 * nhat + 51))
    ws = inf.build_workspace(data, nhat)
    s_scaled = inf.recover_value(ws, sigma, overflow_policy="scaled")
    s_halved = inf.recover_value(ws, sigma, overflow_policy="halve-nhat")
    assert s_scaled.nhat_used == nhat and s_halved.nhat_used == nhat // 2
    mutual = abs(s_scaled.M0 - s_halved.M0) / abs(s_halved.M0)
    assert mutual < 1e-6
    _report(6, f"scaled vs halve-nhat mutual agreement {mutual:.1e}", t0, 60.0)


def test_criterion_07_hermite_loewner():
    t0 = time.perf_counter()
    # interpolation contract on a six-point model
    fom6 = lti.random_stable_system(10, 0.85, seed=107)
    pts6 = np.array([1.1 + 0.4j, 1.1 - 0.4j, 1.6 + 1.0j, 1.6 - 1.0j, 2.2 + 0.2j, 2.2 - 0.2j])
    vals6 = np.array([lti.transfer_value(fom6, p) for p in pts6])
    ders6 = np.array([lti.transfer_derivative(fom6, p) for p in pts6])
    rom6 = loewner.build_hermite_loewner(pts6, vals6, ders6)
    for p, v, d in zip(pts6, vals6, ders6):
        assert abs(rom6.transfer_value(p) - v) <= 1e-8 * abs(v)
        assert abs(rom6.transfer_derivative(p) - d) <= 1e-8 * abs(d)
    assert loewner.realify(rom6).is_real

    # pointwise preservation under realification on a well-conditioned pencil
    # (divided-difference pencils are exponentially conditioned in the point
    # count, so the roundoff-level comparison uses a smaller configuration)
    fom4 = lti.random_stable_system(4, 0.85, seed=3)
    pts4 = np.array([1.2 + 0.5j, 1.2 - 0.5j, 2.0 + 1.5j, 2.0 - 1.5j])
    vals4 = np.array([lti.transfer_value(fom4, p) for p in pts4])
    ders4 = np.array([lti.transfer_derivative(fom4, p) for p in pts4])
    rom4 = loewner.build_hermite_loewner(pts4, vals4, ders4)
    real4 = loewner.realify(rom4)
    assert real4.is_real
    rng = np.random.default_rng(108)
    for _ in range(20):
        z = rng.uniform(1.05, 3.0) * np.exp(1j * rng.uniform(-np.pi, np.pi))
        a, b = rom4.transfer_value(z), real4.transfer_value(z)
        assert abs(a - b) <= 1e-10 * abs(a)
    _report(7, "value/derivative interpolation 1e-8; realify preserves to 1e-10", t0, 60.0)


def test_criterion_08_h2_norms():
    t0 = time.perf_counter()
    rng = np.random.default_rng(109)
    worst = 0.0
    for _ in range(20):
        npairs = int(rng.integers(1, 11))
        rr = rng.uniform(0.1, 0.95, npairs)
        aa = rng.uniform(0.1, np.pi - 0.1, npairs)
        res = rng.standard_normal(npairs) + 1j * rng.standard_normal(npairs)
        pr = h2.PoleResidueForm(
            np.concatenate([rr * np.exp(1j * aa), rr * np.exp(-1j * aa)]),
            np.concatenate([res, res.conj()]),
        )
        q = h2.h2_norm_quadrature(pr, 1e-11)
        c = h2.h2_norm_pole_residue(pr)
        worst = max(worst, abs(q - c) / c)
    assert worst < 1e-8
    single = h2.PoleResidueForm([0.5], [1.0])
    exact = np.sqrt(4.0 / 3.0)
    assert abs(h2.h2_norm_quadrature(single, 1e-12) - exact) <= 1e-10 * exact
    assert abs(h2.h2_norm_pole_residue(single) - exact) <= 1e-10 * exact
    _report(8, f"20 random systems, worst quad-vs-closed {worst:.1e}; analytic case 1e-10", t0, 60.0)


def test_criterion_09_exact_recovery_fixed_point():
    t0 = time.perf_counter()
    details = []
    for r in (1, 2, 4):
        fom = lti.random_stable_system(r, 0.8, seed=30 + r)
        ev = lti.TransferEvaluator(fom)
        config = irka.IrkaConfig(r=r, nhat=3 * r + 2)
        rep_tf = irka.tf_irka(fom, config)
        data = lti.simulate(fom, np.random.default_rng(40 + r).standard_normal(30 * r + 60))
        rep_td = irka.td_irka(data, config)
        assert rep_tf.converged and rep_td.converged
        err_tf = h2.relative_h2_error(ev.value, rep_tf.rom.transfer_value)
        err_td = h2.relative_h2_error(ev.value, rep_td.rom.transfer_value)
        assert err_tf < 1e-6 and err_td < 1e-6
        details.append(f"r={r}: tf {err_tf:.0e} td {err_td:.0e}")
    _report(9, "; ".join(details), t0, 30.0)


def test_criterion_10_paired_h2_convergence():
    t0 = time.perf_counter()
    summaries = []
    for bench in ("advection", "random"):
        if bench == "advection":
            fom = lti.advection_fd_model(200, 20.0, 1e4)
            nhat, T = 600, 4000
        else:
            fom = lti.random_stable_system(100, 0.9, seed=0)
            nhat, T = 200, 2000
        data = lti.simulate(fom, np.random.default_rng(0).standard_normal(T + 1))
        ws = inf.build_workspace(data, nhat)
        ev = lti.TransferEvaluator(fom)
        errs = []
        for r in range(4, 21, 2):
            config = irka.IrkaConfig(r=r, nhat=nhat)
            err_tf = h2.relative_h2_error(ev.value, irka.tf_irka(fom, config).rom.transfer_value, 1e-9)
            err_td = h2.relative_h2_error(
                ev.value, irka.td_irka(data, config, workspace=ws).rom.transfer_value, 1e-9
            )
            assert err_td <= 10 * err_tf, f"{bench} r={r}: td {err_td:.2e} vs tf {err_tf:.2e}"
            errs.append((err_tf, err_td))
        assert errs[-1][0] < errs[0][0] and errs[-1][1] < errs[0][1]
        summaries.append(f"{bench}: tf {errs[0][0]:.1e}->{errs[-1][0]:.1e}, td within 10x")
    _report(10, "; ".join(summaries), t0, 300.0)


def test_criterion_11_conditioning_vs_radius():
    t0 = time.perf_counter()
    n = 60
    fom = lti.random_stable_system(n, 0.9, seed=0)
    data = lti.simulate(fom, np.random.default_rng(0).standard_normal(3 * n + 1))
    ws = inf.build_workspace(data, n)
    kappa_unscaled, kappa_scaled = [], []
    for d in np.round(np.arange(1.0, 2.0 + 0.025, 0.05), 12):
        sv = inf.sigma_vectors(d * np.exp(0.5j), n)
        kappa_unscaled.append(cond.condition_number(ws.Ubasis, sv.zhat * sv.scale.value).kappa)
        kappa_scaled.append(cond.condition_number(ws.Ubasis, sv.zhat).kappa)
    ku, ks = np.array(kappa_unscaled), np.array(kappa_scaled)
    assert np.all(ku[1:] >= ku[:-1] * 0.99)  # nondecreasing with 1% slack
    assert np.all(ks <= ku)
    assert ks[-1] < ks[0]
    _report(11, f"unscaled {ku[0]:.1e}->{ku[-1]:.1e}, scaled {ks[0]:.1f}->{ks[-1]:.1f}", t0, 60.0)


def test_criterion_12_alpha_predictor():
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(20):
        n = 10
        fom = lti.random_stable_system(n, 0.8, seed=100 + k)
        data = lti.simulate(fom, np.random.default_rng(200 + k).standard_normal(4 * n + 1))
        ws = inf.build_workspace(data, n)
        sigma = np.exp(1j * (0.3 + 0.12 * k))
        sv = inf.sigma_vectors(sigma, n)
        H_val = lti.transfer_value(fom, sigma)
        H_der = lti.transfer_derivative(fom, sigma)
        rhs1 = np.concatenate([sv.gamma1_dir, H_val * sv.gamma1_dir]) * sv.gamma1_norm.value
        xi1_norm = np.linalg.norm(ws.Ubasis.T @ rhs1)
        predicted = cond.alpha_predictor(H_val, H_der, xi1_norm, sv.scale.value, sv.gamma1_norm.value)
        z_full = sv.zhat * sv.scale.value
        v = z_full - ws.Ubasis @ (ws.Ubasis.T @ z_full)
        direct = np.linalg.norm(v) / np.linalg.norm(z_full)
        worst = max(worst, abs(predicted - direct) / direct)
    assert worst < 1e-8
    _report(12, f"20 seeded cases, worst rel diff {worst:.1e}", t0, 60.0)


def test_criterion_13_heat_trajectory():
    t0 = time.perf_counter()
    fom = lti.heat_fd_model(100, 0.896, 2700.0, 167.0, 0.8, 1e3)
    T = 4000
    train = lti.simulate(fom, np.random.default_rng(0).standard_normal(T + 1))
    report = irka.td_irka(train, irka.IrkaConfig(r=4, nhat=200))
    assert report.converged
    rom_sys = report.rom.to_discrete_lti()
    t = np.arange(T + 1) / 1e3
    phase = 10.0 * t
    u_test = 10.0 * (2.0 * (phase - np.floor(phase)) - 1.0)
    y_test = lti.simulate(fom, u_test).Y
    y_td = lti.simulate(rom_sys, u_test).Y
    max_err = float(np.max(np.abs(y_test - y_td)))
    assert max_err < 1e-2
    _report(13, f"sawtooth test max error {max_err:.2e}", t0, 120.0)
