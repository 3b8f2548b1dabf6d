"""Dual-polarized RIS-aided ISAC toolkit: channel synthesis, joint precoder /
RIS-phase optimization for sum rate under dual radar-SNR and power constraints,
and reproducible Monte-Carlo experiment sweeps."""

from .chanmodel import (ChannelSet, gen_direct_channel, gen_dp_channels,
                        gen_rician_dp_channel, gen_rician_sp_channel,
                        gen_sp_channels, path_loss_linear, steering_vector,
                        target_responses, xpd_to_beta)
from .driver import (EXPERIMENTS, SolveReport, alternating_optimize, init_state,
                     run_experiment, solve_realization)
from .precopt import (PenaltyResult, PenaltyState, PrecoderContext,
                      SensingInfeasibleError, penalty_solve, solve_X, solve_Y,
                      solve_Z, update_F)
from .risopt import (PhaseQuadraticForm, build_quadratic_form, lambda_max,
                     mm_step, optimize_phase, quad_objective, quantize_phase)
from .scenario import Geometry, Scenario, XpdProfile, load_config, parse_config
from .sysmetrics import (RisPhase, SenseSpec, beampattern, compose_channels,
                         expand_phase, mse_matrix, radar_snr, random_phase,
                         sum_rate, total_power)
from .wmmse import mse_matrices, update_U, update_W, wmmse_objective

__all__ = [
    "ChannelSet", "EXPERIMENTS", "Geometry", "PenaltyResult", "PenaltyState",
    "PhaseQuadraticForm", "PrecoderContext", "RisPhase", "Scenario", "SenseSpec",
    "SensingInfeasibleError", "SolveReport", "XpdProfile", "alternating_optimize",
    "beampattern", "build_quadratic_form", "compose_channels", "gen_direct_channel",
    "gen_dp_channels", "gen_rician_dp_channel", "gen_rician_sp_channel",
    "gen_sp_channels", "init_state", "lambda_max", "load_config", "mm_step",
    "mse_matrices", "mse_matrix", "optimize_phase", "parse_config",
    "path_loss_linear", "penalty_solve", "quad_objective", "quantize_phase",
    "radar_snr", "random_phase", "run_experiment", "solve_X", "solve_Y", "solve_Z",
    "solve_realization", "steering_vector", "sum_rate", "target_responses",
    "total_power", "update_F", "update_U", "update_W", "wmmse_objective",
    "xpd_to_beta",
]
