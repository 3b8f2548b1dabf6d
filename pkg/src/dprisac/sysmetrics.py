"""Optimization state types and performance metrics.

Sum rates are natural-log (nats/s/Hz). The canonical phase-vector order stacks
the polarization blocks column-major over the 2x2 grid: [vv; hv; vh; hh]; block
(p, q) of the expanded matrix sits at vector offset (p + n_pol*q)*L.
"""

from dataclasses import dataclass

import numpy as np

from .chanmodel import ChannelSet, steering_vector


@dataclass
class RisPhase:
    """Unit-modulus reflection coefficients of the RIS, flattened per block.

    phi has n_pol^2 * l entries; l is the per-block element count. For the DP
    surface (n_pol=2) the order is [phi_vv; phi_hv; phi_vh; phi_hh].
    """

    phi: np.ndarray
    l: int
    n_pol: int = 2

    def __post_init__(self):
        self.phi = np.asarray(self.phi, dtype=complex)
        if self.phi.shape != (self.n_pol ** 2 * self.l,):
            raise ValueError(f"phi must have {self.n_pol**2 * self.l} entries")

    def block(self, p: int, q: int) -> np.ndarray:
        i = (p + self.n_pol * q) * self.l
        return self.phi[i:i + self.l]

    def max_modulus_error(self) -> float:
        return float(np.max(np.abs(np.abs(self.phi) - 1.0)))


def random_phase(rng: np.random.Generator, l: int, n_pol: int = 2) -> RisPhase:
    angles = rng.uniform(0.0, 2.0 * np.pi, size=n_pol ** 2 * l)
    return RisPhase(np.exp(1j * angles), l=l, n_pol=n_pol)


@dataclass
class SenseSpec:
    """Radar SNR requirements: linear thresholds and radar noise power."""

    gamma1_th: float
    gamma2_th: float
    sigma_r2: float

    def __post_init__(self):
        if self.gamma1_th <= 0 or self.gamma2_th <= 0:
            raise ValueError("sensing thresholds must be positive")
        if self.sigma_r2 <= 0:
            raise ValueError("sigma_r2 must be positive")


def expand_phase(phase: RisPhase) -> np.ndarray:
    """Block matrix [[diag(vv), diag(vh)], [diag(hv), diag(hh)]] (n_pol*l square)."""
    n = phase.n_pol * phase.l
    out = np.zeros((n, n), dtype=complex)
    for p in range(phase.n_pol):
        for q in range(phase.n_pol):
            rows = slice(p * phase.l, (p + 1) * phase.l)
            cols = slice(q * phase.l, (q + 1) * phase.l)
            out[rows, cols] = np.diag(phase.block(p, q))
    return out


def phase_from_matrix(mat: np.ndarray, l: int, n_pol: int = 2) -> RisPhase:
    """Inverse of expand_phase: collect the block diagonals back into a vector."""
    phi = np.concatenate([np.diag(mat[p * l:(p + 1) * l, q * l:(q + 1) * l])
                          for q in range(n_pol) for p in range(n_pol)])
    return RisPhase(phi, l=l, n_pol=n_pol)


def compose_channels(channels: ChannelSet, phase: RisPhase) -> list:
    """Effective per-user channels H_k = H_dk + H_rk * Phi * G."""
    if phase.l != channels.ris_elements or phase.n_pol != channels.n_pol:
        raise ValueError("phase structure does not match the channel bundle")
    ports = channels.n_pol * channels.ris_elements
    if channels.g.shape[0] != ports:
        raise ValueError("G row count does not match the RIS port count")
    phi_g = expand_phase(phase) @ channels.g
    return [hd + hr @ phi_g for hd, hr in zip(channels.h_d, channels.h_r)]


def total_power(precoders: list) -> float:
    return float(sum(np.sum(np.abs(f) ** 2) for f in precoders))


def sum_rate(effective: list, precoders: list, sigma2: float) -> float:
    """Sum of ln det(I + H_k F_k F_k^H H_k^H J_k^{-1}) over users, J_k the
    interference-plus-noise covariance."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    rate = 0.0
    for k, h in enumerate(effective):
        n_rx = h.shape[0]
        j = sigma2 * np.eye(n_rx, dtype=complex)
        for i, f in enumerate(precoders):
            if i != k:
                hf = h @ f
                j += hf @ hf.conj().T
        hf_k = h @ precoders[k]
        total = j + hf_k @ hf_k.conj().T
        sign_t, logdet_t = np.linalg.slogdet(total)
        sign_j, logdet_j = np.linalg.slogdet(j)
        if sign_j.real <= 0 or sign_t.real <= 0:
            raise ValueError("interference covariance numerically singular")
        rate += logdet_t - logdet_j
    return float(rate)


def mse_matrix(h_k: np.ndarray, precoders: list, u_k: np.ndarray, sigma2: float,
               k: int) -> np.ndarray:
    """Per-user MSE matrix E_k for receive filter U_k (Hermitian by construction)."""
    cov = sum(f @ f.conj().T for f in precoders)
    hu = h_k.conj().T @ u_k
    e = hu.conj().T @ cov @ hu
    cross = u_k.conj().T @ (h_k @ precoders[k])
    e -= cross + cross.conj().T
    e += sigma2 * (u_k.conj().T @ u_k) + np.eye(u_k.shape[1], dtype=complex)
    return e


def radar_snr(precoders: list, vtil: np.ndarray, sigma_r2: float) -> float:
    """gamma = sum_k tr(Vtil^H Vtil F_k F_k^H) / sigma_r2, computed as norms."""
    if sigma_r2 <= 0:
        raise ValueError("sigma_r2 must be positive")
    acc = 0.0
    for f in precoders:
        acc += float(np.sum(np.abs(vtil @ f) ** 2))
    return acc / sigma_r2


def beampattern(precoders: list, theta_grid: np.ndarray, spacing_ratio: float = 0.5):
    """Transmit power pattern split by polarization half.

    Uses the transmit covariance (expectation over symbols):
    Pv(th) = a^H Q_vv a with Q the 2n_t x 2n_t covariance of the stacked ports.
    Returns (pv, ph, ptotal), nonnegative reals per grid angle.
    """
    ports = precoders[0].shape[0]
    if ports % 2:
        raise ValueError("beampattern expects stacked dual-polarized precoders")
    n_t = ports // 2
    cov = sum(f @ f.conj().T for f in precoders)
    steer = np.column_stack([steering_vector(th, n_t, spacing_ratio)
                             for th in np.atleast_1d(theta_grid)])
    pv = np.real(np.einsum("it,ij,jt->t", steer.conj(), cov[:n_t, :n_t], steer))
    ph = np.real(np.einsum("it,ij,jt->t", steer.conj(), cov[n_t:, n_t:], steer))
    return pv, ph, pv + ph
