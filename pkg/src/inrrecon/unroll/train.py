"""Unrolled INR + CG reconstruction and the per-scan training loop."""

import hashlib
import json
import logging
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from ..acquisition.encoding import apply_EH
from ..core import make_rng
from ..inr import HashEncodingConfig, init_inr, render, render_backward
from .adam import Adam, sigmoid, softplus, softplus_inv
from .cg import cg_solve, dc_backward
from .losses import total_loss

log = logging.getLogger(__name__)

PRESETS = {
    "retrospective": {"lambda_init": 0.01, "lambda_s_init": 0.5},
    "prospective": {"lambda_init": 0.05, "lambda_s_init": 2.0},
}

TV_NORMS = ("sum", "mean")


@dataclass(frozen=True)
class UnrollConfig:
    """Settings of one scan-specific training run.

    ``encoding=None`` picks :meth:`HashEncodingConfig.for_image` for the
    image size at train time.
    """

    num_units: int = 1
    cg_iters: int = 20
    lambda_init: float = 0.01
    lambda_s_init: float = 0.5
    learnable_hparams: bool = True
    lr: float = 1e-3
    lr_hparams: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    epochs: int = 2000
    seed: int = 0
    hidden: tuple = (64, 64)
    encoding: HashEncodingConfig | None = None
    early_stop_window: int = 50
    early_stop_tol: float = 1e-6
    divergence_factor: float = 1e3
    tv_norm: str = "sum"

    def __post_init__(self):
        if self.num_units < 1:
            raise ValueError(f"num_units must be >= 1, got {self.num_units}")
        if self.cg_iters < 1:
            raise ValueError(f"cg_iters must be >= 1, got {self.cg_iters}")
        if self.lambda_init <= 0:
            raise ValueError(f"lambda_init must be positive, got {self.lambda_init}")
        if self.lambda_s_init < 0:
            raise ValueError(f"lambda_s_init must be >= 0, got {self.lambda_s_init}")
        if self.epochs < 0:
            raise ValueError(f"epochs must be >= 0, got {self.epochs}")
        if self.tv_norm not in TV_NORMS:
            raise ValueError(f"tv_norm must be one of {TV_NORMS}, got {self.tv_norm!r}")
        object.__setattr__(self, "hidden", tuple(self.hidden))

    @classmethod
    def preset(cls, name, **overrides):
        return cls(**{**PRESETS[name], **overrides})

    def fingerprint(self, *extra):
        """SHA-256 over every setting plus any ``extra`` JSON-able context."""
        payload = json.dumps([asdict(self), *extra], sort_keys=True, default=str)
        return hashlib.sha256(payload.encode()).hexdigest()


@dataclass
class TrainState:
    params: object
    raw_lambda: np.ndarray
    lambda_s: np.ndarray
    theta_opt: Adam
    hyper_opt: Adam
    epoch: int = 0
    history: list = field(default_factory=list)

    @property
    def lam(self):
        return float(softplus(self.raw_lambda))


@dataclass
class ReconReport:
    x_hat: np.ndarray
    history: list
    lam: float
    lambda_s: float
    seconds: float
    fingerprint: str
    psnr: float | None = None
    ssim: float | None = None
    stop_reason: str = "epochs"

    @property
    def losses(self):
        return [h["total"] for h in self.history]


class TrainingDiverged(RuntimeError):
    """Loss blew up; ``report`` holds the state at the time of abort."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


def unroll_forward(params, y, model, lam, num_units, cg_iters):
    """Run the unrolled network.

    ``x0 = E^H y``; each unit renders ``z`` from the coordinate network
    and solves the data-consistency system. ``z`` depends on the
    parameters only, so every unit sees the same regularizer image.

    Returns ``(x_hat, z, render_cache)``.
    """
    h, w = model.shape
    x = apply_EH(y, model)
    z = cache = None
    for _ in range(num_units):
        z, cache = render(params, h, w)
        x = cg_solve(z, y, model, lam, cg_iters)
    return x, z, cache


@dataclass
class Evaluation:
    """Loss and gradients at one parameter point.

    ``grad_lambda`` is with respect to ``lambda`` itself (not its
    softplus pre-image).
    """

    value: float
    parts: dict
    x: np.ndarray
    grads: object
    grad_lambda: float
    grad_lambda_s: float


def tv_weight_for(config, shape):
    """Fixed factor applied to the TV sum: 1, or one over the pixel count."""
    return 1.0 if config.tv_norm == "sum" else 1.0 / (shape[0] * shape[1])


def evaluate(params, lam, lambda_s, y, model, config, use_dc=True, tv_weight=None):
    """Forward pass, loss and full backward pass for one epoch.

    ``y`` is the (already normalized) measured k-space. Without DC the
    rendered image is the output and ``grad_lambda`` is zero.
    """
    if tv_weight is None:
        tv_weight = tv_weight_for(config, model.shape)
    if use_dc:
        x, z, cache = unroll_forward(params, y, model, lam, config.num_units, config.cg_iters)
    else:
        z, cache = render(params, *model.shape)
        x = z
    value, g_x, g_lams, parts = total_loss(y, x, model, lambda_s, tv_weight)
    if use_dc:
        g_z, g_lam = dc_backward(g_x, x, z, model, lam, config.cg_iters)
    else:
        g_z, g_lam = g_x, 0.0
    grads = render_backward(cache, g_z, params)
    return Evaluation(value, parts, x, grads, g_lam, g_lams)


def init_state(config, shape):
    encoding = config.encoding or HashEncodingConfig.for_image(*shape)
    params = init_inr(encoding, config.hidden, make_rng(config.seed))
    opt_kw = dict(beta1=config.beta1, beta2=config.beta2, eps=config.eps)
    return TrainState(
        params=params,
        raw_lambda=np.array(softplus_inv(config.lambda_init)),
        lambda_s=np.array(float(config.lambda_s_init)),
        theta_opt=Adam(lr=config.lr, **opt_kw),
        hyper_opt=Adam(lr=config.lr_hparams, **opt_kw),
    )


def kspace_scale(y, model):
    """Factor that brings ``max |E^H y|`` to one."""
    peak = np.abs(apply_EH(y, model)).max()
    if peak == 0:
        raise ValueError("measured k-space is all zero")
    return 1.0 / peak


def _fingerprint(config, model, use_dc, use_tv):
    return config.fingerprint({"shape": model.shape, "coils": model.num_coils,
                               "pattern": model.mask.pattern, "acs": model.mask.acs_size,
                               "dc": use_dc, "tv": use_tv})


def train(y, model, config, reference=None, use_dc=True, use_tv=True, callback=None):
    """Fit the coordinate network to one scan and return the reconstruction.

    Parameters
    ----------
    y : ndarray
        Measured ``(C, H, W)`` k-space, zero at unsampled locations.
    model : AcquisitionModel
    config : UnrollConfig
    reference : ndarray, optional
        Ground-truth image for PSNR / SSIM in the report.
    use_dc : bool
        ``False`` drops the CG unit and takes the rendered image as the
        output (the no-DC ablation).
    use_tv : bool
        ``False`` freezes ``lambda_s`` at zero (the no-TV ablation).
    callback : callable, optional
        Called with each per-epoch history record.

    Returns
    -------
    (ReconReport, TrainState)

    Raises
    ------
    TrainingDiverged
        When the loss exceeds ``divergence_factor`` times its first value.
    """
    t0 = time.perf_counter()
    scale = kspace_scale(y, model)
    y_n = y * scale
    state = init_state(config, model.shape)
    if not use_tv:
        state.lambda_s[...] = 0.0
    fingerprint = _fingerprint(config, model, use_dc, use_tv)
    tv_weight = tv_weight_for(config, model.shape)
    stop_reason = "epochs"

    def forward(params):
        if use_dc:
            return unroll_forward(params, y_n, model, state.lam, config.num_units,
                                  config.cg_iters)
        z, cache = render(params, *model.shape)
        return z, z, cache

    def report(x_n, reason):
        rep = ReconReport(x_hat=x_n / scale, history=state.history, lam=state.lam,
                          lambda_s=float(state.lambda_s), seconds=time.perf_counter() - t0,
                          fingerprint=fingerprint, stop_reason=reason)
        if reference is not None:
            from ..evaluation.metrics import psnr, ssim
            rep.psnr = psnr(reference, rep.x_hat)
            rep.ssim = ssim(reference, rep.x_hat)
        return rep

    for epoch in range(config.epochs):
        lam = state.lam
        ev = evaluate(state.params, lam, float(state.lambda_s), y_n, model, config,
                      use_dc=use_dc, tv_weight=tv_weight)
        value = ev.value
        record = {"epoch": epoch, "total": value, "dc": ev.parts["dc"], "tv": ev.parts["tv"],
                  "lambda": lam, "lambda_s": float(state.lambda_s)}
        if not np.isfinite(value) or (
                state.history and value > config.divergence_factor * state.history[0]["total"]):
            raise TrainingDiverged(f"loss diverged at epoch {epoch}: {value:.4g}",
                                   report(ev.x, "diverged"))
        state.history.append(record)
        if callback is not None:
            callback(record)

        state.theta_opt.step(state.params.arrays(), ev.grads.arrays())
        if config.learnable_hparams:
            hyper = [state.raw_lambda]
            hgrads = [np.array(ev.grad_lambda * sigmoid(state.raw_lambda))]
            if use_tv:
                hyper.append(state.lambda_s)
                hgrads.append(np.array(ev.grad_lambda_s))
            state.hyper_opt.step(hyper, hgrads)
            np.maximum(state.lambda_s, 0.0, out=state.lambda_s)
        state.epoch = epoch + 1

        w = config.early_stop_window
        if w and len(state.history) > w:
            old = state.history[-1 - w]["total"]
            if abs(value - old) <= config.early_stop_tol * abs(old):
                stop_reason = "converged"
                log.info("early stop at epoch %d", epoch)
                break

    x, _, _ = forward(state.params)
    return report(x, stop_reason), state


