"""Metrics, baselines and experiment harnesses."""

from .baselines import cg_sense, zero_filled
from .experiments import (AblationVariant, RunRecord, SweepResult, SweepRow,
                          reconstruct_variant, run_ablation, run_ablations, sweep_cg_iters,
                          sweep_hyperparams)
from .metrics import PSNR_CAP, PSNR_TABLE_CAP, psnr, ssim

__all__ = [
    "AblationVariant",
    "PSNR_CAP",
    "PSNR_TABLE_CAP",
    "RunRecord",
    "SweepResult",
    "SweepRow",
    "cg_sense",
    "psnr",
    "reconstruct_variant",
    "run_ablation",
    "run_ablations",
    "ssim",
    "sweep_cg_iters",
    "sweep_hyperparams",
    "zero_filled",
]
