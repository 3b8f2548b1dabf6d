"""Dual- and single-polarized channel synthesis.

Conventions
-----------
A DP matrix stacks polarization blocks positionally as [[vv, vh], [hv, hh]]; the
first half of the rows/columns carries the vertical ports, the second half the
horizontal ports. The direct link is Rayleigh, the two RIS links are Rician with
LoS/NLoS components *shared* across the four polarization blocks. All draws flow
through an explicit numpy Generator in a fixed order so realizations replay:
UE positions, then H_d users 1..K, then G, then H_r users 1..K.
"""

from dataclasses import dataclass
import math

import numpy as np

from .scenario import Geometry, Scenario

REFERENCE_DISTANCE_M = 1.0
REFERENCE_LOSS_DB = -30.0


def xpd_to_beta(xpd_db: float) -> float:
    """Cross-polar power fraction beta for a given XPD in dB: XPD = (1-beta)/beta."""
    return 1.0 / (1.0 + 10.0 ** (xpd_db / 10.0))


def beta_to_xpd(beta: float) -> float:
    return 10.0 * math.log10((1.0 - beta) / beta)


def path_loss_linear(distance: float, exponent: float) -> float:
    """Linear power gain 10^((PL0 - 10*alpha*log10(d/d0))/10), PL0 = -30 dB at d0 = 1 m."""
    if distance < REFERENCE_DISTANCE_M:
        raise ValueError(f"distance {distance} m below reference distance 1 m")
    pl_db = REFERENCE_LOSS_DB - 10.0 * exponent * math.log10(distance / REFERENCE_DISTANCE_M)
    return 10.0 ** (pl_db / 10.0)


def steering_vector(theta: float, n: int, spacing_ratio: float = 0.5) -> np.ndarray:
    """ULA response [exp(-j*2*pi*(d/lambda)*m*sin(theta))]_{m=0..n-1}."""
    if n < 1:
        raise ValueError("steering vector needs at least one element")
    m = np.arange(n)
    return np.exp(-2j * np.pi * spacing_ratio * m * np.sin(theta))


def crandn(rng: np.random.Generator, *shape) -> np.ndarray:
    """Standard circularly-symmetric complex Gaussian, unit variance per entry."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def gen_direct_channel(rng: np.random.Generator, n_t: int, beta1_nlos: float,
                       pathloss: float) -> np.ndarray:
    """Rayleigh BS->UE DP channel, shape (2, 2*n_t).

    Co-polar entries have variance pathloss*(1-beta), cross-polar entries
    pathloss*beta; the four blocks are drawn independently (zero XPC).
    """
    if not 0.0 <= beta1_nlos <= 1.0:
        raise ValueError("beta1_nlos outside [0, 1]")
    raw = crandn(rng, 2, 2 * n_t)
    co = math.sqrt(pathloss * (1.0 - beta1_nlos))
    cross = math.sqrt(pathloss * beta1_nlos)
    scale = np.empty((2, 2 * n_t))
    scale[0, :n_t] = co      # vv
    scale[0, n_t:] = cross   # vh
    scale[1, :n_t] = cross   # hv
    scale[1, n_t:] = co      # hh
    return raw * scale


def gen_rician_dp_channel(rng: np.random.Generator, rows: int, cols: int,
                          beta_los: float, beta_nlos: float, omega: float,
                          los_matrix: np.ndarray, pathloss: float) -> np.ndarray:
    """Rician DP channel of shape (2*rows, 2*cols) with shared LoS/NLoS components.

    One NLoS matrix is drawn per call; co-blocks are
    w_L*sqrt(1-b_LoS)*LoS + w_N*sqrt(1-b_NLoS)*NLoS and cross-blocks use the
    complementary beta weights, everything scaled by sqrt(pathloss).
    """
    if los_matrix.shape != (rows, cols):
        raise ValueError(f"los_matrix shape {los_matrix.shape} != ({rows}, {cols})")
    w_l = math.sqrt(omega / (omega + 1.0))
    w_n = math.sqrt(1.0 / (omega + 1.0))
    nlos = crandn(rng, rows, cols)
    co = w_l * math.sqrt(1.0 - beta_los) * los_matrix + w_n * math.sqrt(1.0 - beta_nlos) * nlos
    cross = w_l * math.sqrt(beta_los) * los_matrix + w_n * math.sqrt(beta_nlos) * nlos
    out = np.empty((2 * rows, 2 * cols), dtype=complex)
    out[:rows, :cols] = co       # vv
    out[:rows, cols:] = cross    # vh
    out[rows:, :cols] = cross    # hv
    out[rows:, cols:] = co       # hh
    return math.sqrt(pathloss) * out


def gen_rician_sp_channel(rng: np.random.Generator, rows: int, cols: int,
                          beta_los: float, beta_nlos: float, omega: float,
                          los_matrix: np.ndarray, pathloss: float) -> np.ndarray:
    """Single-polarized Rician mix: only the co-polar weights survive."""
    if los_matrix.shape != (rows, cols):
        raise ValueError(f"los_matrix shape {los_matrix.shape} != ({rows}, {cols})")
    w_l = math.sqrt(omega / (omega + 1.0))
    w_n = math.sqrt(1.0 / (omega + 1.0))
    nlos = crandn(rng, rows, cols)
    mix = w_l * math.sqrt(1.0 - beta_los) * los_matrix + w_n * math.sqrt(1.0 - beta_nlos) * nlos
    return math.sqrt(pathloss) * mix


def target_responses(geometry: Geometry, n_r: int, n_t: int, spacing_ratio: float,
                     eta1: float, eta2: float):
    """Point-target response matrices and their gain/polarization-masked forms.

    Returns (A1, A2, V1, V2, Vtil1, Vtil2): A_i = a_{n_r}(th_i) a_{n_t}(th_i)^H,
    V_i = eta_i*A_i, and Vtil_i = V_i E_i where E_1/E_2 select the vertical /
    horizontal half of the 2*n_t transmit ports.
    """
    th1, th2 = geometry.target_angles
    a1 = np.outer(steering_vector(th1, n_r, spacing_ratio),
                  steering_vector(th1, n_t, spacing_ratio).conj())
    a2 = np.outer(steering_vector(th2, n_r, spacing_ratio),
                  steering_vector(th2, n_t, spacing_ratio).conj())
    v1 = eta1 * a1
    v2 = eta2 * a2
    vtil1 = np.zeros((n_r, 2 * n_t), dtype=complex)
    vtil1[:, :n_t] = v1
    vtil2 = np.zeros((n_r, 2 * n_t), dtype=complex)
    vtil2[:, n_t:] = v2
    return a1, a2, v1, v2, vtil1, vtil2


@dataclass
class ChannelSet:
    """One channel realization: direct links, RIS links, target responses.

    n_pol is 2 for dual-polarized bundles and 1 for the SP baselines;
    ris_elements is the diagonal-block size of the RIS phase structure, so the
    RIS has n_pol*ris_elements ports and the phase vector n_pol^2*ris_elements
    entries.
    """

    h_d: list               # K matrices, each (n_rx, ports_tx)
    g: np.ndarray            # (ports_ris, ports_tx)
    h_r: list                # K matrices, each (n_rx, ports_ris)
    a1: np.ndarray
    a2: np.ndarray
    v1: np.ndarray
    v2: np.ndarray
    vtil1: np.ndarray        # (n_r, ports_tx) sensing map for target 1
    vtil2: np.ndarray
    n_pol: int
    ris_elements: int
    ue_positions: np.ndarray


def draw_ue_positions(rng: np.random.Generator, geometry: Geometry, k: int) -> np.ndarray:
    """k points uniform over the user disc (radius scaled by sqrt of a uniform)."""
    r = geometry.ue_radius * np.sqrt(rng.uniform(size=k))
    ang = rng.uniform(0.0, 2.0 * np.pi, size=k)
    cx, cy = geometry.ue_center
    return np.column_stack([cx + r * np.cos(ang), cy + r * np.sin(ang)])


def gen_dp_channels(rng: np.random.Generator, sc: Scenario) -> ChannelSet:
    """Draw one dual-polarized realization for a scenario."""
    geo = sc.geometry
    prof = sc.xpd_profile()
    ue = draw_ue_positions(rng, geo, sc.k)

    pl_direct = [path_loss_linear(Geometry.distance(geo.bs_position, p), sc.alpha_bs_ue)
                 for p in ue]
    h_d = [gen_direct_channel(rng, sc.n_t, prof.beta1_nlos, pl) for pl in pl_direct]

    aod_bs = Geometry.steering_angle(geo.bs_position, geo.ris_position)
    aoa_ris = Geometry.steering_angle(geo.ris_position, geo.bs_position)
    los_g = np.outer(steering_vector(aoa_ris, sc.l, sc.spacing_ratio),
                     steering_vector(aod_bs, sc.n_t, sc.spacing_ratio).conj())
    pl_g = path_loss_linear(Geometry.distance(geo.bs_position, geo.ris_position),
                            sc.alpha_bs_ris)
    g = gen_rician_dp_channel(rng, sc.l, sc.n_t, prof.beta2_los, prof.beta2_nlos,
                              prof.rician_factor, los_g, pl_g)

    h_r = []
    for p in ue:
        aod_ris = Geometry.steering_angle(geo.ris_position, (p[0], p[1]))
        los_r = steering_vector(aod_ris, sc.l, sc.spacing_ratio).conj()[None, :]
        pl = path_loss_linear(Geometry.distance(geo.ris_position, (p[0], p[1])),
                              sc.alpha_ris_ue)
        h_r.append(gen_rician_dp_channel(rng, 1, sc.l, prof.beta3_los, prof.beta3_nlos,
                                         prof.rician_factor, los_r, pl))

    eta1, eta2 = sc.target_gains()
    a1, a2, v1, v2, vt1, vt2 = target_responses(geo, sc.n_r, sc.n_t, sc.spacing_ratio,
                                                eta1, eta2)
    return ChannelSet(h_d=h_d, g=g, h_r=h_r, a1=a1, a2=a2, v1=v1, v2=v2,
                      vtil1=vt1, vtil2=vt2, n_pol=2, ris_elements=sc.l,
                      ue_positions=ue)


def gen_sp_channels(rng: np.random.Generator, sc: Scenario, scale: str) -> ChannelSet:
    """Single-polarized baseline bundle.

    scale='1x' keeps the DP element counts (n_t antennas, l RIS elements, one
    antenna per user); scale='2x' doubles n_t and l and gives users two antennas.
    Sensing uses the unmasked V_i (one covariance serves both targets).
    """
    if scale not in ("1x", "2x"):
        raise ValueError("scale must be '1x' or '2x'")
    mult = 1 if scale == "1x" else 2
    n_t = mult * sc.n_t
    l = mult * sc.l
    n_rx = mult  # per-user antennas

    geo = sc.geometry
    prof = sc.xpd_profile()
    ue = draw_ue_positions(rng, geo, sc.k)

    var_direct = 1.0 - prof.beta1_nlos
    h_d = []
    for p in ue:
        pl = path_loss_linear(Geometry.distance(geo.bs_position, (p[0], p[1])),
                              sc.alpha_bs_ue)
        h_d.append(math.sqrt(pl * var_direct) * crandn(rng, n_rx, n_t))

    aod_bs = Geometry.steering_angle(geo.bs_position, geo.ris_position)
    aoa_ris = Geometry.steering_angle(geo.ris_position, geo.bs_position)
    los_g = np.outer(steering_vector(aoa_ris, l, sc.spacing_ratio),
                     steering_vector(aod_bs, n_t, sc.spacing_ratio).conj())
    pl_g = path_loss_linear(Geometry.distance(geo.bs_position, geo.ris_position),
                            sc.alpha_bs_ris)
    g = gen_rician_sp_channel(rng, l, n_t, prof.beta2_los, prof.beta2_nlos,
                              prof.rician_factor, los_g, pl_g)

    h_r = []
    for p in ue:
        aod_ris = Geometry.steering_angle(geo.ris_position, (p[0], p[1]))
        aoa_ue = Geometry.steering_angle((p[0], p[1]), geo.ris_position)
        los_r = np.outer(steering_vector(aoa_ue, n_rx, sc.spacing_ratio),
                         steering_vector(aod_ris, l, sc.spacing_ratio).conj())
        pl = path_loss_linear(Geometry.distance(geo.ris_position, (p[0], p[1])),
                              sc.alpha_ris_ue)
        h_r.append(gen_rician_sp_channel(rng, n_rx, l, prof.beta3_los, prof.beta3_nlos,
                                         prof.rician_factor, los_r, pl))

    eta1, eta2 = sc.target_gains()
    th1, th2 = geo.target_angles
    a1 = np.outer(steering_vector(th1, sc.n_r, sc.spacing_ratio),
                  steering_vector(th1, n_t, sc.spacing_ratio).conj())
    a2 = np.outer(steering_vector(th2, sc.n_r, sc.spacing_ratio),
                  steering_vector(th2, n_t, sc.spacing_ratio).conj())
    v1 = eta1 * a1
    v2 = eta2 * a2
    return ChannelSet(h_d=h_d, g=g, h_r=h_r, a1=a1, a2=a2, v1=v1, v2=v2,
                      vtil1=v1, vtil2=v2, n_pol=1, ris_elements=l,
                      ue_positions=ue)
