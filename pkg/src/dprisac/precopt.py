"""Precoder subproblem: two-layer penalty method with closed-form block updates.

Inner layer (fixed rho): F from a regularized normal equation, X from the power
projection (bisection on the dual variable tau), Y/Z from the sensing pulls
(closed-form dual mu in [0,1)). Outer layer shrinks rho by the factor c until
the three coupling residuals ||X-F||_F^2, ||Y-Vt1 F||_F^2, ||Z-Vt2 F||_F^2 drop
below xi_tol.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from .sysmetrics import radar_snr, total_power


class SensingInfeasibleError(RuntimeError):
    """The precoder carries no energy toward a target whose SNR floor is positive."""


@dataclass
class PrecoderContext:
    """Everything held fixed while the precoders are optimized."""

    h_eff: list
    receivers: list
    weights: list
    vtil1: np.ndarray
    vtil2: np.ndarray
    p0: float
    gamma1_th: float
    gamma2_th: float
    sigma_r2: float


@dataclass
class PenaltyState:
    """Snapshot of one outer iteration."""

    rho: float
    res_x: float
    res_y: float
    res_z: float
    objective: float
    tau: float
    mu1: float
    mu2: float
    inner_iters: int
    F: list = None
    X: list = None
    Y: list = None
    Z: list = None


@dataclass
class PenaltyResult:
    F: list
    states: list = field(default_factory=list)
    converged: bool = False

    @property
    def residuals(self):
        s = self.states[-1]
        return (s.res_x, s.res_y, s.res_z)


def _wmmse_gram(h_eff, receivers, weights):
    ports = h_eff[0].shape[1]
    s = np.zeros((ports, ports), dtype=complex)
    for h, u, w in zip(h_eff, receivers, weights):
        hu = h.conj().T @ u
        s += hu @ w @ hu.conj().T
    return 0.5 * (s + s.conj().T)


def update_F(h_eff: list, receivers: list, weights: list, X: list, Y: list, Z: list,
             vtil1: np.ndarray, vtil2: np.ndarray, rho: float) -> list:
    """Closed-form minimizer F_k = A_k^{-1} b_k of the penalized inner objective.

    Solved in the rho-scaled form (rho*2*S + I + Vt1^H Vt1 + Vt2^H Vt2) F = rho*b,
    which stays well conditioned as rho -> 0.
    """
    if rho <= 0:
        raise ValueError("rho must be positive")
    s = _wmmse_gram(h_eff, receivers, weights)
    ports = s.shape[0]
    m = np.eye(ports, dtype=complex) + vtil1.conj().T @ vtil1 + vtil2.conj().T @ vtil2
    a_scaled = 2.0 * rho * s + m
    rhs = [x + vtil1.conj().T @ y + vtil2.conj().T @ z
           + 2.0 * rho * (h.conj().T @ u @ w)
           for x, y, z, h, u, w in zip(X, Y, Z, h_eff, receivers, weights)]
    sol = np.linalg.solve(a_scaled, np.concatenate(rhs, axis=1))
    cols = X[0].shape[1]
    return [sol[:, i * cols:(i + 1) * cols] for i in range(len(X))]


def tau_closed_form(lam: float, p0: float) -> float:
    """Exact dual for the power projection: 0 if feasible, else sqrt(lam/p0) - 1."""
    if lam <= p0:
        return 0.0
    return math.sqrt(lam / p0) - 1.0


def solve_X(F: list, p0: float, eta: float = 1e-10):
    """Power projection X_k = F_k/(1+tau); tau by bisection on [0, sqrt(lam/p0)]."""
    if p0 <= 0:
        raise ValueError("p0 must be positive")
    lam = total_power(F)
    if lam <= p0:
        return [f.copy() for f in F], 0.0
    lb, ub = 0.0, math.sqrt(lam / p0)
    while ub - lb > eta:
        tau = 0.5 * (lb + ub)
        if lam / (1.0 + tau) ** 2 > p0:
            lb = tau
        else:
            ub = tau
    tau = 0.5 * (lb + ub)
    return [f / (1.0 + tau) for f in F], tau


def solve_Y(F: list, vtil: np.ndarray, gamma_th: float, sigma_r2: float):
    """Sensing pull Y_k = Vtil F_k/(1-mu); mu solves S/(1-mu)^2 = gamma_th*sigma_r2."""
    target = gamma_th * sigma_r2
    vf = [vtil @ f for f in F]
    s = float(sum(np.sum(np.abs(m) ** 2) for m in vf))
    if s >= target:
        return vf, 0.0
    if s <= 0.0:
        raise SensingInfeasibleError(
            "precoders carry no energy toward the target; SNR floor unreachable")
    mu = 1.0 - math.sqrt(s / target)
    scale = 1.0 / (1.0 - mu)
    return [scale * m for m in vf], mu


def solve_Z(F: list, vtil: np.ndarray, gamma_th: float, sigma_r2: float):
    return solve_Y(F, vtil, gamma_th, sigma_r2)


def penalized_objective(h_eff, receivers, weights, F, X, Y, Z, vtil1, vtil2,
                        rho: float) -> float:
    """Inner objective: WMMSE terms plus the 1/(2 rho)-weighted coupling penalties."""
    s = _wmmse_gram(h_eff, receivers, weights)
    val = 0.0
    for k, f in enumerate(F):
        val += float(np.real(np.trace(f.conj().T @ s @ f)))
        val -= 2.0 * float(np.real(np.trace(
            weights[k] @ receivers[k].conj().T @ h_eff[k] @ f)))
    pen = _residuals(F, X, Y, Z, vtil1, vtil2)
    return val + 0.5 / rho * sum(pen)


def _residuals(F, X, Y, Z, vtil1, vtil2):
    rx = sum(float(np.sum(np.abs(x - f) ** 2)) for x, f in zip(X, F))
    ry = sum(float(np.sum(np.abs(y - vtil1 @ f) ** 2)) for y, f in zip(Y, F))
    rz = sum(float(np.sum(np.abs(z - vtil2 @ f) ** 2)) for z, f in zip(Z, F))
    return rx, ry, rz


def penalty_solve(F_init: list, ctx: PrecoderContext, rho0: float = 5.0, c: float = 0.7,
                  xi_tol: float = 1e-6, eps_tol: float = 1e-4, max_outer: int = 60,
                  max_inner: int = 30, keep_iterates: bool = False) -> PenaltyResult:
    """Run the two-layer penalty scheme from a feasible-ish starting point.

    The sensing maps are normalized internally (vhat_i = Vtil_i/sqrt(gamma_i_th
    sigma_r2), floor 1) so the Y/Z couplings and residuals live at the same O(1)
    scale as the power coupling; the constraint set is unchanged.
    """
    if rho0 <= 0 or not 0.0 < c < 1.0:
        raise ValueError("need rho0 > 0 and 0 < c < 1")
    vhat1, vhat2, t1, t2 = _normalized_maps(ctx)

    F = [f.copy() for f in F_init]
    X = [f.copy() for f in F_init]
    Y = [vhat1 @ f for f in F_init]
    Z = [vhat2 @ f for f in F_init]
    rho = rho0
    result = PenaltyResult(F=F)

    for _ in range(max_outer):
        obj_prev = None
        tau = mu1 = mu2 = 0.0
        inner = 0
        for inner in range(1, max_inner + 1):
            F = update_F(ctx.h_eff, ctx.receivers, ctx.weights, X, Y, Z,
                         vhat1, vhat2, rho)
            X, tau = solve_X(F, ctx.p0)
            Y, mu1 = solve_Y(F, vhat1, t1, 1.0)
            Z, mu2 = solve_Z(F, vhat2, t2, 1.0)
            obj = penalized_objective(ctx.h_eff, ctx.receivers, ctx.weights,
                                      F, X, Y, Z, vhat1, vhat2, rho)
            if obj_prev is not None and abs(obj - obj_prev) <= eps_tol * (1.0 + abs(obj_prev)):
                break
            obj_prev = obj
        rx, ry, rz = _residuals(F, X, Y, Z, vhat1, vhat2)
        state = PenaltyState(rho=rho, res_x=rx, res_y=ry, res_z=rz, objective=obj,
                             tau=tau, mu1=mu1, mu2=mu2, inner_iters=inner)
        if keep_iterates:
            state.F = [f.copy() for f in F]
            state.X = [x.copy() for x in X]
            state.Y = [y.copy() for y in Y]
            state.Z = [z.copy() for z in Z]
        result.states.append(state)
        if max(rx, ry, rz) < xi_tol and _sensing_ok(_scale_to_power(F, ctx.p0), ctx):
            result.converged = True
            break
        rho *= c

    F = _project_terminal(F, ctx, rho)
    result.F = F
    return result


def _normalized_maps(ctx: PrecoderContext):
    """Sensing maps scaled so an active constraint reads sum ||vhat F||^2 >= 1."""
    s1 = math.sqrt(ctx.gamma1_th * ctx.sigma_r2) if ctx.gamma1_th > 0 else 1.0
    s2 = math.sqrt(ctx.gamma2_th * ctx.sigma_r2) if ctx.gamma2_th > 0 else 1.0
    t1 = 1.0 if ctx.gamma1_th > 0 else 0.0
    t2 = 1.0 if ctx.gamma2_th > 0 else 0.0
    return ctx.vtil1 / s1, ctx.vtil2 / s2, t1, t2


def _project_terminal(F, ctx: PrecoderContext, rho: float):
    """Feasibility cleanup: exact power scaling, one more inner pass if a sensing
    constraint is still off by more than 1e-6 relative."""
    F = _scale_to_power(F, ctx.p0)
    if _sensing_ok(F, ctx):
        return F
    vhat1, vhat2, t1, t2 = _normalized_maps(ctx)
    X, _ = solve_X(F, ctx.p0)
    Y, _ = solve_Y(F, vhat1, t1, 1.0)
    Z, _ = solve_Z(F, vhat2, t2, 1.0)
    F = update_F(ctx.h_eff, ctx.receivers, ctx.weights, X, Y, Z,
                 vhat1, vhat2, rho)
    return _scale_to_power(F, ctx.p0)


def _scale_to_power(F, p0: float):
    lam = total_power(F)
    if lam <= p0:
        return F
    scale = math.sqrt(p0 / lam)
    return [scale * f for f in F]


def _sensing_ok(F, ctx: PrecoderContext, rel: float = 1e-6) -> bool:
    g1 = radar_snr(F, ctx.vtil1, ctx.sigma_r2)
    g2 = radar_snr(F, ctx.vtil2, ctx.sigma_r2)
    return (g1 >= ctx.gamma1_th * (1.0 - rel)) and (g2 >= ctx.gamma2_th * (1.0 - rel))
