"""RIS phase optimization by majorization-minimization.

The phase-only part of the weighted-MSE objective is the quadratic
f(phi) = phi^H Xi phi + 2 Re(phi^H xi), assembled from the aggregates
Fbar = sum_k H_rk^H U_k W_k U_k^H H_rk, C = G (sum_k F_k F_k^H) G^H and
P = sum_k (M_k^H - N_k^H). With the canonical block order [vv; hv; vh; hh]
the identities tr(Fbar Phi C Phi^H) = phi^H Xi phi and tr(Phi P) = xi^H phi
pin the assembly: Xi block (a+n*d, b+n*c) = Fbar_ab o C_cd^T (o = Hadamard)
and xi block (p + n*q) = vecd(P_qp^H). Each MM step maximizes
Re(phi^H q) with q = (lambda_max I - Xi) phi - xi, which never increases f.
"""

from dataclasses import dataclass

import numpy as np

from .chanmodel import ChannelSet
from .sysmetrics import RisPhase


@dataclass
class PhaseQuadraticForm:
    """Hermitian PSD quadratic Xi, linear term xi, and the phase-independent rest."""

    Xi: np.ndarray
    xi: np.ndarray
    const_terms: float
    l: int
    n_pol: int


def _hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def _block(m: np.ndarray, i: int, j: int, size: int) -> np.ndarray:
    return m[i * size:(i + 1) * size, j * size:(j + 1) * size]


def assemble_quadratic(fbar: np.ndarray, c_mat: np.ndarray, p_mat: np.ndarray,
                       n_pol: int, l: int):
    """Map the (Fbar, C, P) aggregates onto (Xi, xi) for the canonical phi order.

    Satisfies tr(Fbar Phi C Phi^H) = phi^H Xi phi and tr(Phi P) = xi^H phi for
    every block-structured Phi.
    """
    dim = n_pol ** 2 * l
    xi_mat = np.zeros((dim, dim), dtype=complex)
    for a in range(n_pol):
        for d in range(n_pol):
            r = a + n_pol * d
            for b in range(n_pol):
                for cc in range(n_pol):
                    s = b + n_pol * cc
                    xi_mat[r * l:(r + 1) * l, s * l:(s + 1) * l] = (
                        _block(fbar, a, b, l) * _block(c_mat, cc, d, l).T)
    xi_mat = _hermitize(xi_mat)

    xi_vec = np.zeros(dim, dtype=complex)
    for q in range(n_pol):
        for p in range(n_pol):
            pos = p + n_pol * q
            xi_vec[pos * l:(pos + 1) * l] = np.conj(np.diag(_block(p_mat, q, p, l)))
    return xi_mat, xi_vec


def build_quadratic_form(channels: ChannelSet, precoders: list, receivers: list,
                         weights: list) -> PhaseQuadraticForm:
    """Assemble (Xi, xi, const) for the current (F, U, W)."""
    n_pol = channels.n_pol
    l = channels.ris_elements
    ports = n_pol * l
    g = channels.g
    if g.shape[0] != ports:
        raise ValueError("G row count does not match the RIS port structure")

    cov = sum(f @ f.conj().T for f in precoders)
    fbar = np.zeros((ports, ports), dtype=complex)
    p_mat = np.zeros((ports, ports), dtype=complex)
    const = 0.0
    for k, (hd, hr) in enumerate(zip(channels.h_d, channels.h_r)):
        t = receivers[k] @ weights[k] @ receivers[k].conj().T
        fbar += hr.conj().T @ t @ hr
        # M_k^H - N_k^H: the phi-linear parts of the quadratic and signal terms
        p_mat += g @ cov @ hd.conj().T @ t @ hr
        p_mat -= g @ precoders[k] @ weights[k] @ receivers[k].conj().T @ hr
        const += float(np.real(np.trace(t @ hd @ cov @ hd.conj().T)))
        const -= 2.0 * float(np.real(np.trace(
            weights[k] @ receivers[k].conj().T @ hd @ precoders[k])))
    fbar = _hermitize(fbar)
    c = _hermitize(g @ cov @ g.conj().T)
    xi_mat, xi_vec = assemble_quadratic(fbar, c, p_mat, n_pol, l)
    return PhaseQuadraticForm(Xi=xi_mat, xi=xi_vec, const_terms=const, l=l, n_pol=n_pol)


def quad_objective(form: PhaseQuadraticForm, phi: np.ndarray) -> float:
    """f(phi) without the constant terms."""
    return float(np.real(np.vdot(phi, form.Xi @ phi)) + 2.0 * np.real(np.vdot(phi, form.xi)))


def lambda_max(xi_mat: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(_hermitize(xi_mat))[-1])


def mm_step(phi: np.ndarray, form: PhaseQuadraticForm, lam_max: float) -> np.ndarray:
    """phi_next = exp(j arg(q)), q = (lam I - Xi) phi - xi; zero q keeps the old phase."""
    q = lam_max * phi - form.Xi @ phi - form.xi
    mag = np.abs(q)
    out = np.where(mag > 0.0, q / np.where(mag > 0.0, mag, 1.0), phi)
    return out


def optimize_phase(phase: RisPhase, form: PhaseQuadraticForm, tol: float = 1e-6,
                   max_iter: int = 200):
    """Iterate mm_step until the objective stalls; returns (phase, per-step f trace)."""
    lam = lambda_max(form.Xi)
    phi = phase.phi.copy()
    f_prev = quad_objective(form, phi)
    trace = []
    for _ in range(max_iter):
        phi = mm_step(phi, form, lam)
        f = quad_objective(form, phi)
        trace.append(f)
        if abs(f - f_prev) <= tol * (1.0 + abs(f)):
            break
        f_prev = f
    return RisPhase(phi, l=phase.l, n_pol=phase.n_pol), trace


def quantize_phase(phi: np.ndarray, m_bits: int) -> np.ndarray:
    """Snap each phase to the nearest of the 2^m grid angles {2*pi*m/2^M}.

    Circular distance decides; exact midpoints go to the smaller grid index.
    """
    if m_bits < 1:
        raise ValueError("need at least one quantization bit")
    levels = 2 ** m_bits
    step = 2.0 * np.pi / levels
    angles = np.mod(np.angle(phi), 2.0 * np.pi)
    idx_f = np.floor(angles / step)
    frac = angles / step - idx_f
    idx = np.where(frac > 0.5, idx_f + 1.0, idx_f)
    idx = np.mod(idx, levels)
    return np.exp(1j * step * idx)
