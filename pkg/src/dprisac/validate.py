"""Self-contained oracle checks behind the ``validate`` CLI subcommand.

Each check re-derives an identity the solvers rely on (rate/MSE equivalence,
quadratic-form traces, MM descent, dual bisection) on freshly drawn small
instances and reports pass/fail. The helpers that build those instances are
also used by the test suite.
"""

import numpy as np

from .chanmodel import ChannelSet, crandn
from .precopt import solve_X, tau_closed_form
from .risopt import build_quadratic_form, optimize_phase, quad_objective, quantize_phase
from .sysmetrics import compose_channels, expand_phase, random_phase, sum_rate
from .wmmse import mse_matrices, update_U, update_W, wmmse_objective


def random_instance(rng: np.random.Generator, k: int = 2, n_t: int = 2, l: int = 2,
                    n_pol: int = 2, p0: float = 1.0):
    """Small random channel bundle + feasible random state for identity checks."""
    tx = n_pol * n_t
    ris = n_pol * l
    n_rx = n_pol
    n_r = 3
    h_d = [crandn(rng, n_rx, tx) for _ in range(k)]
    g = crandn(rng, ris, tx)
    h_r = [crandn(rng, n_rx, ris) for _ in range(k)]
    a1 = crandn(rng, n_r, n_t)
    a2 = crandn(rng, n_r, n_t)
    vt1 = np.zeros((n_r, tx), dtype=complex)
    vt1[:, :n_t] = a1
    vt2 = np.zeros((n_r, tx), dtype=complex)
    vt2[:, tx - n_t:] = a2
    channels = ChannelSet(h_d=h_d, g=g, h_r=h_r, a1=a1, a2=a2, v1=a1, v2=a2,
                          vtil1=vt1, vtil2=vt2, n_pol=n_pol, ris_elements=l,
                          ue_positions=np.zeros((k, 2)))
    F = [crandn(rng, tx, n_rx) for _ in range(k)]
    scale = np.sqrt(p0 / sum(np.sum(np.abs(f) ** 2) for f in F))
    F = [scale * f for f in F]
    phase = random_phase(rng, l, n_pol)
    return channels, F, phase


def solver_state(rng: np.random.Generator, k: int = 2, n_t: int = 2, l: int = 3,
                 sigma2: float = 0.1):
    """Channels plus (F, phase, U, W) as the alternating loop would see them."""
    channels, F, phase = random_instance(rng, k=k, n_t=n_t, l=l)
    h_eff = compose_channels(channels, phase)
    U = update_U(h_eff, F, sigma2)
    E = mse_matrices(h_eff, F, U, sigma2)
    W = update_W(E)
    return channels, F, phase, h_eff, U, W


def check_rate_mse_identity(n_instances: int = 20, seed: int = 0) -> float:
    """max |sum_rate - wmmse_objective| over random instances at (U_opt, W_opt)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        channels, F, phase = random_instance(rng)
        sigma2 = 0.05 + rng.uniform()
        h_eff = compose_channels(channels, phase)
        rate = sum_rate(h_eff, F, sigma2)
        U = update_U(h_eff, F, sigma2)
        E = mse_matrices(h_eff, F, U, sigma2)
        W = update_W(E)
        worst = max(worst, abs(rate - wmmse_objective(W, E)))
    return worst


def check_quadratic_form(n_instances: int = 10, n_probes: int = 20, seed: int = 1) -> float:
    """Worst relative error of the two trace identities on real solver states."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        channels, F, phase, h_eff, U, W = solver_state(rng)
        form = build_quadratic_form(channels, F, U, W)
        l, n_pol = channels.ris_elements, channels.n_pol
        cov = sum(f @ f.conj().T for f in F)
        fbar = sum(hr.conj().T @ (u @ w @ u.conj().T) @ hr
                   for hr, u, w in zip(channels.h_r, U, W))
        c = channels.g @ cov @ channels.g.conj().T
        p = np.zeros_like(c)
        for k_i, (hd, hr) in enumerate(zip(channels.h_d, channels.h_r)):
            t = U[k_i] @ W[k_i] @ U[k_i].conj().T
            p += channels.g @ cov @ hd.conj().T @ t @ hr
            p -= channels.g @ F[k_i] @ W[k_i] @ U[k_i].conj().T @ hr
        for _ in range(n_probes):
            probe = random_phase(rng, l, n_pol)
            mat = expand_phase(probe)
            quad_ref = np.real(np.trace(fbar @ mat @ c @ mat.conj().T))
            quad = np.real(np.vdot(probe.phi, form.Xi @ probe.phi))
            lin_ref = np.trace(mat @ p)
            lin = np.vdot(form.xi, probe.phi)
            scale = max(abs(quad_ref), abs(lin_ref), 1e-30)
            worst = max(worst, abs(quad - quad_ref) / scale,
                        abs(lin - lin_ref) / scale)
    return worst


def check_mm_descent(n_seeds: int = 10, seed: int = 2) -> float:
    """Largest per-step increase of f along optimize_phase traces (<= 0 ideally)."""
    rng = np.random.default_rng(seed)
    worst = -np.inf
    for _ in range(n_seeds):
        channels, F, phase, h_eff, U, W = solver_state(rng)
        form = build_quadratic_form(channels, F, U, W)
        f0 = quad_objective(form, phase.phi)
        _, trace = optimize_phase(phase, form, tol=0.0, max_iter=40)
        vals = [f0] + trace
        worst = max(worst, max(b - a for a, b in zip(vals, vals[1:])))
    return worst


def check_bisection(n_instances: int = 20, seed: int = 3) -> float:
    """Worst |tau_bisect - tau_closed| and complementary-slackness residual."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_instances):
        k = int(rng.integers(1, 4))
        F = [crandn(rng, 4, 2) * rng.uniform(0.2, 3.0) for _ in range(k)]
        p0 = rng.uniform(0.05, 5.0)
        X, tau = solve_X(F, p0)
        lam = sum(float(np.sum(np.abs(f) ** 2)) for f in F)
        worst = max(worst, abs(tau - tau_closed_form(lam, p0)))
        power_x = sum(float(np.sum(np.abs(x) ** 2)) for x in X)
        worst = max(worst, abs(tau * (power_x - p0)))
    return worst


def check_quantization(seed: int = 4) -> float:
    """Grid points must be fixed points; all outputs unit modulus."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for m in (1, 2, 3, 4):
        grid = np.exp(1j * 2 * np.pi * np.arange(2 ** m) / 2 ** m)
        worst = max(worst, float(np.max(np.abs(quantize_phase(grid, m) - grid))))
        phi = np.exp(1j * rng.uniform(0, 2 * np.pi, size=32))
        worst = max(worst, float(np.max(np.abs(np.abs(quantize_phase(phi, m)) - 1.0))))
    return worst


def validate_suite() -> list:
    """Run all checks; returns (name, passed, detail) triples."""
    checks = [
        ("rate_mse_identity", check_rate_mse_identity(), 1e-8),
        ("quadratic_form_identity", check_quadratic_form(), 1e-9),
        ("mm_descent", check_mm_descent(), 1e-10),
        ("bisection_vs_closed_form", check_bisection(), 1e-6),
        ("quantization_grid", check_quantization(), 1e-12),
    ]
    return [(name, value <= tol, f"worst={value:.3e} tol={tol:.0e}")
            for name, value, tol in checks]
