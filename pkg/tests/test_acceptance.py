"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The statistical criteria (7, 8, 10, 11) run the shipped experiment sweeps at
50 realizations per point with two workers and read back the CSVs they write.
Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion lines.
"""

import csv
import math
import time
from collections import defaultdict

import numpy as np
import pytest

from dprisac.chanmodel import gen_dp_channels, gen_rician_dp_channel
from dprisac.driver import (gen_channels, init_state, realization_rngs,
                            run_experiment, solve_realization)
from dprisac.precopt import PrecoderContext, penalty_solve
from dprisac.risopt import build_quadratic_form, lambda_max, optimize_phase, quad_objective
from dprisac.scenario import Scenario
from dprisac.sysmetrics import compose_channels, radar_snr, random_phase, total_power
from dprisac.validate import (check_bisection, check_quadratic_form,
                              check_rate_mse_identity, solver_state)
from dprisac.wmmse import mse_matrices, update_U, update_W

N_SEEDS = 50
N_JOBS = 2


def _report(num, name, ok, detail):
    print(f"[ACCEPTANCE] criterion {num} ({name}): {'PASS' if ok else 'FAIL'} — {detail}")
    assert ok, f"criterion {num} ({name}): {detail}"


def _read_rows(path):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        return header, list(reader)


def _rates_by(path, key_cols, seed_col, rate_col):
    header, rows = _read_rows(path)
    out = defaultdict(dict)
    for row in rows:
        key = tuple(row[i] for i in key_cols)
        out[key][int(row[seed_col])] = float(row[rate_col])
    return out


def _mean_se(values):
    arr = np.asarray(values, dtype=float)
    se = arr.std(ddof=1) / math.sqrt(len(arr)) if len(arr) > 1 else 0.0
    return float(arr.mean()), float(se)


def test_criterion_1_rate_mse_identity():
    t0 = time.perf_counter()
    worst = check_rate_mse_identity(n_instances=200, seed=101)
    dt = time.perf_counter() - t0
    ok = worst < 1e-8 and dt < 5.0
    _report(1, "rate-MSE identity", ok, f"worst |diff| = {worst:.3e} in {dt:.2f}s")


def test_criterion_2_quadratic_form_oracle():
    t0 = time.perf_counter()
    worst = check_quadratic_form(n_instances=100, n_probes=20, seed=102)
    dt = time.perf_counter() - t0
    ok = worst < 1e-9 and dt < 5.0
    _report(2, "quadratic-form oracle", ok, f"worst rel err = {worst:.3e} in {dt:.2f}s")


def test_criterion_3_mm_majorization_descent():
    rng = np.random.default_rng(103)
    worst_gap = 0.0       # surrogate must dominate: quad - surrogate <= 1e-9
    worst_touch = 0.0     # equality at the expansion point to 1e-10
    worst_step = -np.inf  # objective may not increase along traces
    for _ in range(100):
        channels, F, phase, h_eff, U, W = solver_state(rng, l=2)
        form = build_quadratic_form(channels, F, U, W)
        lam = lambda_max(form.Xi)
        x = lam * np.eye(form.Xi.shape[0])
        phi = random_phase(rng, channels.ris_elements, channels.n_pol).phi
        phi_t = random_phase(rng, channels.ris_elements, channels.n_pol).phi
        quad = np.real(np.vdot(phi, form.Xi @ phi))
        sur = (np.real(np.vdot(phi, x @ phi))
               - 2.0 * np.real(np.vdot(phi, (x - form.Xi) @ phi_t))
               + np.real(np.vdot(phi_t, (x - form.Xi) @ phi_t)))
        worst_gap = max(worst_gap, quad - sur)
        quad_t = np.real(np.vdot(phi_t, form.Xi @ phi_t))
        sur_t = (np.real(np.vdot(phi_t, x @ phi_t))
                 - 2.0 * np.real(np.vdot(phi_t, (x - form.Xi) @ phi_t))
                 + np.real(np.vdot(phi_t, (x - form.Xi) @ phi_t)))
        worst_touch = max(worst_touch, abs(sur_t - quad_t))
        out, trace = optimize_phase(phase, form, tol=0.0, max_iter=30)
        vals = [quad_objective(form, phase.phi)] + trace
        worst_step = max(worst_step, max(b - a for a, b in zip(vals, vals[1:])))
    ok = worst_gap <= 1e-9 and worst_touch <= 1e-10 and worst_step <= 1e-10
    _report(3, "MM majorization + descent", ok,
            f"domination gap {worst_gap:.2e}, touch err {worst_touch:.2e}, "
            f"worst step increase {worst_step:.2e} over 100 seeds")


def test_criterion_4_bisection_vs_closed_form():
    worst = check_bisection(n_instances=100, seed=104)
    ok = worst < 1e-6
    _report(4, "bisection vs closed form", ok,
            f"worst |tau error| / slackness = {worst:.3e} over 100 draws")


def test_criterion_5_penalty_convergence():
    t0 = time.perf_counter()
    sc = Scenario()
    rng_chan, rng_init = realization_rngs(sc, 0)
    channels = gen_dp_channels(rng_chan, sc)
    F, phase = init_state(sc, channels, rng_init)
    sigma2 = sc.noise_power()
    h_eff = compose_channels(channels, phase)
    U = update_U(h_eff, F, sigma2)
    W = update_W(mse_matrices(h_eff, F, U, sigma2))
    g1, g2 = sc.gamma_thresholds()
    ctx = PrecoderContext(h_eff=h_eff, receivers=U, weights=W,
                          vtil1=channels.vtil1, vtil2=channels.vtil2, p0=sc.p0,
                          gamma1_th=g1, gamma2_th=g2, sigma_r2=sc.radar_noise())
    res = penalty_solve(F, ctx, rho0=5.0, c=0.7, xi_tol=1e-6, max_outer=60)
    dt = time.perf_counter() - t0
    worst = max(res.residuals)
    ok = res.converged and len(res.states) <= 60 and worst <= 1e-6 and dt < 120.0
    _report(5, "penalty convergence", ok,
            f"residuals {tuple(f'{r:.2e}' for r in res.residuals)} after "
            f"{len(res.states)} outer iterations in {dt:.1f}s")


def test_criterion_6_feasibility_at_convergence():
    checks = []
    cases = [(Scenario(), 0, "dp"), (Scenario(), 1, "dp"), (Scenario(), 0, "sp1x"),
             (Scenario(gamma1_th_db=26.0, gamma2_th_db=26.0), 0, "dp")]
    for sc, idx, var in cases:
        rep = solve_realization(sc, idx, var)
        rng_chan, _ = realization_rngs(sc, idx)
        channels = gen_channels(sc, rng_chan, var)
        power = total_power(rep.precoders)
        g1 = radar_snr(rep.precoders, channels.vtil1, sc.radar_noise())
        g2 = radar_snr(rep.precoders, channels.vtil2, sc.radar_noise())
        t1, t2 = sc.gamma_thresholds()
        checks.append(power <= sc.p0 * (1 + 1e-6)
                      and g1 >= t1 * (1 - 1e-3) and g2 >= t2 * (1 - 1e-3))
    ok = all(checks)
    _report(6, "feasibility at convergence", ok,
            f"{sum(checks)}/{len(checks)} solves feasible under independent recomputation")


@pytest.fixture(scope="module")
def out_root(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


def test_criterion_7_sp_dp_ordering(out_root):
    t0 = time.perf_counter()
    out = out_root / "sp_comparison"
    paths = run_experiment("sp_comparison", str(out), scenario=Scenario(),
                           n_seeds=N_SEEDS, n_jobs=N_JOBS,
                           nt_values=(4, 6, 8, 10))
    data = _rates_by(paths["data"], key_cols=(0, 1), seed_col=2, rate_col=3)
    dt = time.perf_counter() - t0
    details = []
    ok = dt <= 1800.0
    for nt in ("4", "6", "8", "10"):
        m = {var: _mean_se(list(data[(nt, var)].values()))[0]
             for var in ("sp1x", "dp", "sp2x")}
        # common random numbers across variants: paired differences are the
        # correct (most powerful) separation test
        seps = {}
        for lo, hi in (("sp1x", "dp"), ("dp", "sp2x")):
            diffs = [data[(nt, hi)][i] - data[(nt, lo)][i]
                     for i in sorted(data[(nt, lo)])]
            mean_d, se_d = _mean_se(diffs)
            seps[(lo, hi)] = mean_d > 3.0 * se_d
        ratio = m["dp"] / m["sp1x"]
        cond = seps[("sp1x", "dp")] and seps[("dp", "sp2x")] and 1.4 <= ratio <= 2.2
        ok = ok and cond
        details.append(f"nt={nt}: sp1x={m['sp1x']:.2f} dp={m['dp']:.2f} "
                       f"sp2x={m['sp2x']:.2f} ratio={ratio:.2f} "
                       f"[sp1x<dp@3SE:{seps[('sp1x','dp')]}, dp<sp2x@3SE:{seps[('dp','sp2x')]}]")
    _report(7, "SP/DP ordering", ok, "; ".join(details) + f" ({dt:.0f}s)")


def test_criterion_8_sensing_rate_tradeoff(out_root):
    gammas = (20.0, 21.0, 22.0, 23.0, 24.0, 25.0, 26.0)
    out = out_root / "snr_tradeoff"
    paths = run_experiment("snr_tradeoff", str(out), scenario=Scenario(),
                           n_seeds=N_SEEDS, n_jobs=N_JOBS, nt_values=(6,),
                           gamma_db_values=gammas)
    data = _rates_by(paths["data"], key_cols=(1,), seed_col=2, rate_col=3)
    means = []
    monotone = True
    step_info = []
    for g0, g1 in zip(gammas, gammas[1:]):
        r0 = data[(str(g0),)]
        r1 = data[(str(g1),)]
        diffs = [r1[i] - r0[i] for i in sorted(r0)]
        mean_d, se_d = _mean_se(diffs)
        step_info.append(f"{g0}->{g1}: {mean_d:+.2f}±{se_d:.2f}")
        if mean_d > se_d:  # increase beyond one standard error breaks monotonicity
            monotone = False
    for g in gammas:
        means.append(_mean_se(list(data[(str(g),)].values()))[0])
    drop = 1.0 - means[-1] / means[0]
    ok = monotone and drop >= 0.5
    _report(8, "sensing-rate tradeoff", ok,
            f"mean rate {means[0]:.2f} -> {means[-1]:.2f} nats (drop {drop*100:.1f}%), "
            f"steps: {'; '.join(step_info)}")


def test_criterion_9_beampattern(out_root):
    out = out_root / "beampattern"
    paths = run_experiment("beampattern", str(out), scenario=Scenario())
    header, rows = _read_rows(paths["data"])
    grid = np.array([float(r[0]) for r in rows])
    pv = np.array([float(r[1]) for r in rows])
    ph = np.array([float(r[2]) for r in rows])
    details = []
    ok = True
    for name, pat, target in (("pv", pv, -20.0), ("ph", ph, 40.0)):
        med = float(np.median(pat))
        local = [i for i in range(1, len(pat) - 1)
                 if pat[i] >= pat[i - 1] and pat[i] >= pat[i + 1]
                 and abs(grid[i] - target) <= 2.0]
        if not local:
            ok = False
            details.append(f"{name}: no local max within ±2° of {target}")
            continue
        i = max(local, key=lambda j: pat[j])
        rel_db = 10.0 * math.log10(pat[i] / med)
        ok = ok and rel_db >= 10.0
        details.append(f"{name}: peak {grid[i]:+.1f}° at {rel_db:.1f} dB over median")
    _report(9, "beampattern", ok, "; ".join(details))


def test_criterion_10_quantization(out_root):
    out = out_root / "quantization"
    paths = run_experiment("quantization", str(out), scenario=Scenario(),
                           n_seeds=N_SEEDS, n_jobs=N_JOBS, nt_values=(6,),
                           variants=("dp",), bits_values=(1, 2, 3, 4, 5, 6))
    data = _rates_by(paths["data"], key_cols=(3,), seed_col=4, rate_col=5)
    cont = data[("0",)]
    m1 = data[("1",)]
    m3 = data[("3",)]
    m4 = data[("4",)]
    mean_cont = _mean_se(list(cont.values()))[0]
    mean_m4 = _mean_se(list(m4.values()))[0]
    within = abs(mean_m4 - mean_cont) / mean_cont
    diffs = [m3[i] - m1[i] for i in sorted(m1)]
    mean_d, se_d = _mean_se(diffs)
    ok = within <= 0.05 and mean_d > 2.0 * se_d
    _report(10, "quantization", ok,
            f"cont {mean_cont:.2f}, M4 {mean_m4:.2f} ({within*100:.1f}% off), "
            f"M3-M1 gap {mean_d:.2f} ± {se_d:.2f} (needs > 2 SE)")


def test_criterion_11_xpd_sweep(out_root):
    grid = ((1.0, 4.0), (3.0, 6.0), (5.0, 8.0), (7.0, 11.0), (9.0, 13.0), (11.0, 14.0))
    out = out_root / "xpd_sweep"
    paths = run_experiment("xpd_sweep", str(out), scenario=Scenario(),
                           n_seeds=N_SEEDS, n_jobs=N_JOBS, l_values=(10, 40),
                           xpd_grid=grid)
    data = _rates_by(paths["data"], key_cols=(0, 1), seed_col=3, rate_col=4)
    ok = True
    details = []
    for l in ("10", "40"):
        steps = []
        for (los0, _), (los1, _) in zip(grid, grid[1:]):
            r0 = data[(l, str(los0))]
            r1 = data[(l, str(los1))]
            diffs = [r1[i] - r0[i] for i in sorted(r0)]
            mean_d, se_d = _mean_se(diffs)
            steps.append((mean_d, se_d))
            if not mean_d >= se_d:  # strictly increasing at one standard error
                ok = False
        details.append(f"L={l}: steps " + ", ".join(f"{m:+.2f}±{s:.2f}" for m, s in steps))
    _report(11, "XPD sweep", ok, "; ".join(details))


def test_criterion_12_channel_statistics():
    rng = np.random.default_rng(112)
    worst = 0.0
    # direct-family empirical XPD across the three betas
    for beta in (0.1368, 0.2403, 0.5):
        from dprisac.chanmodel import gen_direct_channel
        co = cross = 0.0
        for _ in range(100):
            h = gen_direct_channel(rng, 500, beta, 1.0)
            co += np.sum(np.abs(h[0, :500]) ** 2)
            cross += np.sum(np.abs(h[1, :500]) ** 2)
        worst = max(worst, abs(co / cross - (1 - beta) / beta) / ((1 - beta) / beta))
    # Rician families with beta_los = beta_nlos = beta share the same ratio
    los = np.exp(-1j * np.pi * 0.3 * np.arange(4))[None, :]
    for beta in (0.1368, 0.2403, 0.5):
        co = cross = 0.0
        for _ in range(10000):
            g = gen_rician_dp_channel(rng, 1, 4, beta, beta, 2.5, los, 1.0)
            co += np.sum(np.abs(g[0, :4]) ** 2)
            cross += np.sum(np.abs(g[1, :4]) ** 2)
        worst = max(worst, abs(co / cross - (1 - beta) / beta) / ((1 - beta) / beta))
    # shared-component property at beta = 0.5
    g = gen_rician_dp_channel(rng, 3, 5, 0.5, 0.5, 2.5, np.ones((3, 5)), 1.0)
    shared = (np.array_equal(g[:3, :5], g[:3, 5:])
              and np.array_equal(g[:3, :5], g[3:, :5])
              and np.array_equal(g[:3, :5], g[3:, 5:]))
    # power conservation of the direct channel
    total = 0.0
    n_t, pathloss = 400, 1.7
    for _ in range(200):
        h = gen_direct_channel(rng, n_t, 0.2403, pathloss)
        total += np.sum(np.abs(h[0]) ** 2)
    cons = abs(total / 200 - pathloss * n_t) / (pathloss * n_t)
    ok = worst <= 0.05 and shared and cons <= 0.05
    _report(12, "channel statistics", ok,
            f"worst XPD rel err {worst:.3f}, shared-blocks {shared}, "
            f"power conservation err {cons:.3f}")
