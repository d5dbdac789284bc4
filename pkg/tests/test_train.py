
import numpy as np
import pytest

from conftest import crandn, rel_err
from inrrecon.acquisition import (AcquisitionModel, ScenarioSpec, apply_E, gen_mask,
                                  synth_sensitivities)
from inrrecon.core import make_rng
from inrrecon.evaluation import cg_sense
from inrrecon.inr import HashEncodingConfig, init_inr, render
from inrrecon.unroll import (TrainingDiverged, UnrollConfig, evaluate, init_state,
                             kspace_scale, train, unroll_forward)

TINY_ENC = HashEncodingConfig(levels=2, table_size=64, features=2, base_resolution=4, growth=2.0)


def tiny_config(**kw):
    base = dict(encoding=TINY_ENC, hidden=(4,), epochs=5, cg_iters=20)
    return UnrollConfig(**{**base, **kw})


@pytest.fixture(scope="module")
def tiny_problem():
    rng = make_rng(5)
    maps = synth_sensitivities(2, 16, 16)
    model = AcquisitionModel(maps, gen_mask("random-lines", 16, 16, 2, 4, rng))
    x = crandn(rng, 16, 16)
    y = apply_E(x, model)
    return model, y * kspace_scale(y, model)


def randomized_params(seed, config=TINY_ENC):
    """Parameters with O(1) entries so every path carries gradient."""
    rng = make_rng(seed)
    p = init_inr(config, (4,), rng)
    return p.unpack(rng.standard_normal(p.pack().size) * 0.7)


def chain_fd(model, y, cfg, params, lam, lam_s, h=1e-4, use_dc=True):
    # h well above the CG stopping tolerance (1e-10 relative residual),
    # which otherwise shows up as noise in the differences
    ev = evaluate(params, lam, lam_s, y, model, cfg, use_dc=use_dc)
    flat = params.pack()
    an = ev.grads.pack()
    worst = 0.0

    def f(p, l, ls):
        return evaluate(p, l, ls, y, model, cfg, use_dc=use_dc).value

    rng = make_rng(9)
    # every MLP entry plus a sample of table entries that are actually used
    n_tab = params.tables.size
    used = np.flatnonzero(an[:n_tab])
    idx = np.concatenate([rng.choice(used, size=min(40, used.size), replace=False),
                          np.arange(n_tab, flat.size)])
    for i in idx:
        d = np.zeros_like(flat)
        d[i] = h
        fd = (f(params.unpack(flat + d), lam, lam_s) - f(params.unpack(flat - d), lam, lam_s)) / (2 * h)
        worst = max(worst, abs(fd - an[i]) / max(abs(fd), 1e-6))
    fd_lam = (f(params, lam + h * lam, lam_s) - f(params, lam - h * lam, lam_s)) / (2 * h * lam)
    fd_lams = (f(params, lam, lam_s + h) - f(params, lam, lam_s - h)) / (2 * h)
    worst_h = max(abs(fd_lam - ev.grad_lambda) / max(abs(fd_lam), 1e-6),
                  abs(fd_lams - ev.grad_lambda_s) / max(abs(fd_lams), 1e-6))
    return worst, worst_h


def test_full_chain_gradient_truncated_cg(tiny_problem):
    model, y = tiny_problem
    worst, worst_h = chain_fd(model, y, tiny_config(cg_iters=20), randomized_params(1), 0.05, 0.3)
    assert worst < 1e-3 and worst_h < 1e-3


def test_full_chain_gradient_converged_cg(tiny_problem):
    model, y = tiny_problem
    worst, worst_h = chain_fd(model, y, tiny_config(cg_iters=500), randomized_params(2), 0.05, 0.3)
    assert worst < 1e-5 and worst_h < 1e-5


def test_full_chain_gradient_without_dc(tiny_problem):
    model, y = tiny_problem
    # closed-form path: no solver noise, so a small step is accurate
    worst, worst_h = chain_fd(model, y, tiny_config(), randomized_params(3), 0.05, 0.3,
                              h=1e-6, use_dc=False)
    assert worst < 1e-5 and worst_h < 1e-5


def test_epochs_zero_returns_initial_forward(tiny_problem):
    model, y = tiny_problem
    cfg = tiny_config(epochs=0)
    rep, state = train(y, model, cfg)
    scale = kspace_scale(y, model)
    x0, _, _ = unroll_forward(init_state(cfg, model.shape).params, y * scale, model,
                              cfg.lambda_init, 1, cfg.cg_iters)
    assert rep.history == [] and state.epoch == 0
    assert rel_err(rep.x_hat, x0 / scale) < 1e-14


def test_two_units_equal_one(tiny_problem):
    # z depends on the parameters only, so a second unit repeats the first
    model, y = tiny_problem
    p = randomized_params(4)
    x1, _, _ = unroll_forward(p, y, model, 0.05, 1, 20)
    x2, _, _ = unroll_forward(p, y, model, 0.05, 2, 20)
    assert np.array_equal(x1, x2)


def test_zero_regularizer_is_cg_sense(tiny_problem):
    model, y = tiny_problem
    p = randomized_params(5).zeros_like()
    z, _ = render(p, *model.shape)
    assert not np.any(z)
    scale = kspace_scale(y, model)
    x, _, _ = unroll_forward(p, y * scale, model, 0.01, 1, 20)
    assert np.array_equal(x / scale, cg_sense(y, model, 0.01, 20))


def test_deterministic(tiny_problem):
    model, y = tiny_problem
    a, _ = train(y, model, tiny_config(epochs=8))
    b, _ = train(y, model, tiny_config(epochs=8))
    assert a.history == b.history
    assert np.array_equal(a.x_hat, b.x_hat)
    assert a.fingerprint == b.fingerprint
    c, _ = train(y, model, tiny_config(epochs=8, seed=1))
    assert c.losses != a.losses


def test_history_records_and_lambda_positive(tiny_problem):
    model, y = tiny_problem
    seen = []
    rep, state = train(y, model, tiny_config(epochs=6, lr_hparams=0.5), callback=seen.append)
    assert [h["epoch"] for h in rep.history] == list(range(6))
    assert seen == rep.history
    assert set(rep.history[0]) == {"epoch", "total", "dc", "tv", "lambda", "lambda_s"}
    assert all(h["lambda"] > 0 and h["lambda_s"] >= 0 for h in rep.history)
    assert state.lam > 0 and float(state.lambda_s) >= 0


def test_frozen_hyperparameters(tiny_problem):
    model, y = tiny_problem
    rep, _ = train(y, model, tiny_config(epochs=4, learnable_hparams=False))
    assert {h["lambda_s"] for h in rep.history} == {0.5}
    assert len({h["lambda"] for h in rep.history}) == 1


def test_no_tv_equals_zero_lambda_s(tiny_problem):
    model, y = tiny_problem
    a, _ = train(y, model, tiny_config(epochs=5), use_tv=False)
    b, _ = train(y, model, tiny_config(epochs=5, lambda_s_init=0.0), use_tv=False)
    assert np.array_equal(a.x_hat, b.x_hat)
    assert all(h["lambda_s"] == 0 for h in a.history)


def test_early_stop(tiny_problem):
    model, y = tiny_problem
    rep, _ = train(y, model, tiny_config(epochs=200, lr=0.0, lr_hparams=0.0, early_stop_window=5))
    assert rep.stop_reason == "converged" and len(rep.history) == 6


def test_divergence_raises(tiny_problem):
    model, y = tiny_problem
    with pytest.raises(TrainingDiverged) as info:
        train(y, model, tiny_config(epochs=50, lr=5.0, divergence_factor=1.0001,
                                    early_stop_window=0))
    assert info.value.report.stop_reason == "diverged"


def test_reference_metrics(tiny_problem):
    model, y = tiny_problem
    ref = np.ones(model.shape)
    rep, _ = train(y, model, tiny_config(epochs=2), reference=ref)
    assert np.isfinite(rep.psnr) and -1 <= rep.ssim <= 1


def test_config_validation():
    for bad in [dict(num_units=0), dict(cg_iters=0), dict(lambda_init=0), dict(lambda_s_init=-1),
                dict(epochs=-1), dict(tv_norm="median")]:
        with pytest.raises(ValueError):
            UnrollConfig(**bad)
    p = UnrollConfig.preset("prospective")
    assert (p.lambda_init, p.lambda_s_init) == (0.05, 2.0)
    assert UnrollConfig().fingerprint() == UnrollConfig().fingerprint()
    assert UnrollConfig().fingerprint() != UnrollConfig(seed=1).fingerprint()


@pytest.mark.slow
def test_loss_decreases_on_phantom():
    # 128x128, 8 coils, R=4 random lines, default settings
    sc = ScenarioSpec().build()
    rep, _ = train(sc.kspace, sc.model, UnrollConfig())
    assert rep.losses[-1] < 0.25 * rep.losses[0]
