"""Unrolled reconstruction: CG data consistency, losses, optimizer and training."""

from .adam import Adam
from .cg import SolverError, cg_solve, dc_backward, solve_normal
from .losses import loss_dc, loss_tv, total_loss
from .train import (PRESETS, TV_NORMS, Evaluation, ReconReport, TrainingDiverged, TrainState,
                    UnrollConfig, evaluate, init_state, kspace_scale, train, tv_weight_for,
                    unroll_forward)

__all__ = [
    "Adam",
    "Evaluation",
    "PRESETS",
    "ReconReport",
    "SolverError",
    "TV_NORMS",
    "TrainState",
    "TrainingDiverged",
    "UnrollConfig",
    "cg_solve",
    "dc_backward",
    "evaluate",
    "init_state",
    "kspace_scale",
    "loss_dc",
    "loss_tv",
    "solve_normal",
    "total_loss",
    "train",
    "tv_weight_for",
    "unroll_forward",
]
