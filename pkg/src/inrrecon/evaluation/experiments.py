"""Ablation, hyperparameter and CG-iteration experiment harnesses.

Every harness takes a :class:`~inrrecon.acquisition.ScenarioSpec` and an
:class:`~inrrecon.unroll.UnrollConfig`. For each seed the scenario is
rebuilt with that seed (new mask draw and noise) and the network is
initialized with the same seed.
"""

import enum
import logging
import math
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..unroll.cg import SolverError
from ..unroll.train import TrainingDiverged, train
from .baselines import cg_sense
from .metrics import psnr, ssim

log = logging.getLogger(__name__)

# failures that mark a sweep cell as missing instead of aborting the sweep
CELL_ERRORS = (TrainingDiverged, SolverError, FloatingPointError, ValueError)


class AblationVariant(str, enum.Enum):
    BASELINE = "baseline"
    NO_REGULARIZER = "no_regularizer"
    NO_DC = "no_dc"
    NO_TV = "no_tv"


@dataclass
class RunRecord:
    """Outcome of one (cell, seed) run; ``error`` is set for missing cells."""

    label: str
    seed: int
    psnr: float
    ssim: float
    seconds: float
    error: str | None = None

    @property
    def ok(self):
        return self.error is None


@dataclass
class SweepRow:
    axis: dict
    psnr_mean: float
    psnr_std: float
    ssim_mean: float
    ssim_std: float
    seconds_mean: float
    num_seeds: int
    num_missing: int = 0


@dataclass
class SweepResult:
    """One row per axis value, in the order the axis was given."""

    name: str
    axis_names: tuple
    rows: list = field(default_factory=list)
    runs: list = field(default_factory=list)

    def column(self, key):
        return np.array([getattr(r, key) for r in self.rows], dtype=float)

    def row(self, **axis):
        for r in self.rows:
            if all(r.axis.get(k) == v for k, v in axis.items()):
                return r
        raise KeyError(f"no row with axis {axis}")

    def best(self, key="psnr_mean"):
        """Axis values of the first row maximizing ``key`` (missing rows skipped)."""
        values = self.column(key)
        if np.all(np.isnan(values)):
            raise ValueError("every cell is missing")
        return self.rows[int(np.nanargmax(values))].axis

    def to_dict(self):
        return {"name": self.name, "axis_names": list(self.axis_names),
                "rows": [asdict(r) for r in self.rows], "runs": [asdict(r) for r in self.runs]}


def _summarize(axis, runs):
    good = [r for r in runs if r.ok]
    if not good:
        nan = math.nan
        return SweepRow(axis, nan, nan, nan, nan, nan, len(runs), len(runs))
    p = np.array([r.psnr for r in good])
    s = np.array([r.ssim for r in good])
    t = np.array([r.seconds for r in good])
    return SweepRow(axis, float(p.mean()), float(p.std()), float(s.mean()), float(s.std()),
                    float(t.mean()), len(runs), len(runs) - len(good))


def _seeded(config, seed):
    return replace(config, seed=seed)


def reconstruct_variant(variant, scenario, config):
    """Reconstruct ``scenario`` with one ablation variant.

    Returns ``(x_hat, seconds)``. ``no_regularizer`` is plain CG-SENSE at
    the configured initial ``lambda`` and CG iteration count.
    """
    variant = AblationVariant(variant)
    y, model = scenario.kspace, scenario.model
    if variant is AblationVariant.NO_REGULARIZER:
        t0 = time.perf_counter()
        x = cg_sense(y, model, config.lambda_init, config.cg_iters)
        return x, time.perf_counter() - t0
    rep, _ = train(y, model, config,
                   use_dc=variant is not AblationVariant.NO_DC,
                   use_tv=variant is not AblationVariant.NO_TV)
    return rep.x_hat, rep.seconds


def _record(label, seed, image, fn):
    try:
        x, seconds = fn()
    except CELL_ERRORS as exc:
        log.warning("cell %s seed %d failed: %s", label, seed, exc)
        return RunRecord(label, seed, math.nan, math.nan, math.nan, f"{type(exc).__name__}: {exc}")
    return RunRecord(label, seed, psnr(image, x), ssim(image, x), seconds)


def run_ablations(variants, spec, config, seeds, callback=None):
    """Run several ablation variants on shared per-seed scenarios.

    Parameters
    ----------
    variants : iterable of AblationVariant or str
    spec : ScenarioSpec
    config : UnrollConfig
    seeds : iterable of int
    callback : callable, optional
        Called with each :class:`RunRecord` as it completes.

    Returns
    -------
    SweepResult
        Axis ``variant``; one row per variant with mean and std over seeds.
    """
    variants = [AblationVariant(v) for v in variants]
    seeds = list(seeds)
    if not seeds:
        raise ValueError("at least one seed is required")
    runs = {v: [] for v in variants}
    for seed in seeds:
        scenario = spec.with_seed(seed).build()
        cfg = _seeded(config, seed)
        for v in variants:
            rec = _record(v.value, seed, scenario.image,
                          lambda v=v: reconstruct_variant(v, scenario, cfg))
            runs[v].append(rec)
            if callback is not None:
                callback(rec)
    result = SweepResult("ablation", ("variant",))
    for v in variants:
        result.rows.append(_summarize({"variant": v.value}, runs[v]))
        result.runs.extend(runs[v])
    return result


def run_ablation(variant, spec, config, seeds):
    """Single-variant form of :func:`run_ablations`."""
    return run_ablations([variant], spec, config, seeds)


def _train_cell(scenario, config):
    rep, _ = train(scenario.kspace, scenario.model, config)
    return rep.x_hat, rep.seconds


def _run_grid(name, axis_names, cells, spec, seeds, callback):
    """``cells`` is a list of ``(axis_dict, config)``; seeds vary innermost."""
    seeds = list(seeds)
    if not seeds:
        raise ValueError("at least one seed is required")
    scenarios = {s: spec.with_seed(s).build() for s in seeds}
    result = SweepResult(name, tuple(axis_names))
    for axis, cfg in cells:
        label = ",".join(f"{k}={v}" for k, v in axis.items())
        runs = []
        for s in seeds:
            sc = scenarios[s]
            rec = _record(label, s, sc.image,
                          lambda sc=sc, s=s: _train_cell(sc, _seeded(cfg, s)))
            runs.append(rec)
            if callback is not None:
                callback(rec)
        result.rows.append(_summarize(axis, runs))
        result.runs.extend(runs)
    return result


def sweep_hyperparams(spec, config, lambda_grid, lambda_s_grid, seeds, cross=False,
                      callback=None):
    """Train over initial values of ``lambda`` and ``lambda_s``.

    By default one factor varies at a time while the other stays at its
    value in ``config`` (rows for the ``lambda`` axis come first). With
    ``cross=True`` every pair of the two grids is trained. Whether the
    hyperparameters keep learning is governed by
    ``config.learnable_hparams``. A failing cell is recorded with NaN
    metrics and the sweep continues.
    """
    lambda_grid, lambda_s_grid = list(lambda_grid), list(lambda_s_grid)
    if not lambda_grid or not lambda_s_grid:
        raise ValueError("hyperparameter grids must be nonempty")
    if cross:
        pairs = [(lam, ls) for lam in lambda_grid for ls in lambda_s_grid]
    else:
        pairs = [(lam, config.lambda_s_init) for lam in lambda_grid]
        pairs += [(config.lambda_init, ls) for ls in lambda_s_grid]
    cells = [({"lambda": float(lam), "lambda_s": float(ls)},
              replace(config, lambda_init=float(lam), lambda_s_init=float(ls)))
             for lam, ls in pairs]
    return _run_grid("hyperparams", ("lambda", "lambda_s"), cells, spec, seeds, callback)


def sweep_cg_iters(spec, config, iters_list, seeds=(0,), callback=None):
    """Train once per CG iteration count; rows record metrics and wall-clock."""
    iters_list = [int(n) for n in iters_list]
    if not iters_list:
        raise ValueError("iteration list must be nonempty")
    bad = [n for n in iters_list if n < 1]
    if bad:
        raise ValueError(f"CG iteration counts must be >= 1, got {bad}")
    cells = [({"cg_iters": n}, replace(config, cg_iters=n)) for n in iters_list]
    return _run_grid("cg_iters", ("cg_iters",), cells, spec, seeds, callback)
