"""Weighted-MMSE reformulation: receiver/weight updates and the rate-equivalent
objective sum_k (ln det W_k - tr(W_k E_k) + d_k), d_k the per-user stream count."""

import numpy as np

from .sysmetrics import mse_matrix


def update_U(effective: list, precoders: list, sigma2: float) -> list:
    """MMSE receivers U_k = (H_k sum_i F_i F_i^H H_k^H + sigma2 I)^{-1} H_k F_k."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    out = []
    for k, h in enumerate(effective):
        n_rx = h.shape[0]
        cov = sigma2 * np.eye(n_rx, dtype=complex)
        for f in precoders:
            hf = h @ f
            cov += hf @ hf.conj().T
        out.append(np.linalg.solve(cov, h @ precoders[k]))
    return out


def mse_matrices(effective: list, precoders: list, receivers: list, sigma2: float) -> list:
    return [mse_matrix(h, precoders, u, sigma2, k)
            for k, (h, u) in enumerate(zip(effective, receivers))]


def _inv_small(e: np.ndarray) -> np.ndarray:
    """Closed-form inverse for the 1x1/2x2 weights; adjugate keeps it deterministic."""
    n = e.shape[0]
    scale = float(np.max(np.abs(e)))
    if n == 1:
        det = e[0, 0]
        if abs(det) <= 1e-14 * max(scale, 1.0):
            raise ValueError("MSE matrix numerically singular")
        return np.array([[1.0 / det]], dtype=complex)
    if n == 2:
        det = e[0, 0] * e[1, 1] - e[0, 1] * e[1, 0]
        if abs(det) <= 1e-14 * max(scale, 1.0) ** 2:
            raise ValueError("MSE matrix numerically singular")
        return np.array([[e[1, 1], -e[0, 1]], [-e[1, 0], e[0, 0]]], dtype=complex) / det
    return np.linalg.inv(e)


def update_W(mse_list: list) -> list:
    """Optimal weights W_k = E_k^{-1}, Hermitized."""
    out = []
    for e in mse_list:
        w = _inv_small(np.asarray(e, dtype=complex))
        out.append(0.5 * (w + w.conj().T))
    return out


def wmmse_objective(weights: list, mse_list: list) -> float:
    """sum_k (ln det W_k - tr(W_k E_k) + d); equals the sum rate at (U_opt, W_opt)."""
    total = 0.0
    for w, e in zip(weights, mse_list):
        sign, logdet = np.linalg.slogdet(w)
        if sign.real <= 0:
            raise ValueError("weight matrix must have positive determinant")
        total += logdet - float(np.real(np.trace(w @ e))) + w.shape[0]
    return float(total)
