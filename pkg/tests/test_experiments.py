import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import crandn, rel_err
from inrrecon.acquisition import (AcquisitionModel, ScenarioSpec, apply_E, build_scenario,
                                  gen_mask)
from inrrecon.evaluation import (AblationVariant, cg_sense, psnr, reconstruct_variant,
                                 run_ablation, run_ablations, sweep_cg_iters, sweep_hyperparams,
                                 zero_filled)
from inrrecon.evaluation.experiments import SweepResult, SweepRow
from inrrecon.inr import HashEncodingConfig
from inrrecon.unroll import UnrollConfig, train

SPEC = ScenarioSpec(size=32, coils=4, accel=3, acs=6)
CFG = UnrollConfig(epochs=4, hidden=(8,),
                   encoding=HashEncodingConfig(levels=3, table_size=256, base_resolution=4))


def test_zero_filled_examples(rng):
    full = gen_mask("random-lines", 16, 16, 1, 2)
    model = AcquisitionModel(np.ones((1, 16, 16)), full)
    x = crandn(rng, 16, 16)
    assert rel_err(zero_filled(apply_E(x, model), model), x) < 1e-14
    assert not np.any(zero_filled(np.zeros((1, 16, 16)), model))
    sc = SPEC.build()
    full_sc = replace(SPEC, accel=1).build()
    assert psnr(sc.image, zero_filled(sc.kspace, sc.model)) < \
        psnr(full_sc.image, zero_filled(full_sc.kspace, full_sc.model))


def test_cg_sense_examples(rng):
    full = gen_mask("random-lines", 16, 16, 1, 2)
    maps = crandn(rng, 3, 16, 16)
    maps /= np.sqrt((np.abs(maps) ** 2).sum(0))
    model = AcquisitionModel(maps, full)
    y = apply_E(crandn(rng, 16, 16), model)
    assert rel_err(cg_sense(y, model, 1e-6, 20), zero_filled(y, model)) < 1e-4
    assert np.abs(cg_sense(y, model, 1e9, 20)).max() < 1e-6 * np.abs(zero_filled(y, model)).max()
    assert not np.any(cg_sense(np.zeros_like(y), model))
    sc = replace(SPEC, size=64, accel=4, acs=8).build()
    assert psnr(sc.image, cg_sense(sc.kspace, sc.model)) >= \
        psnr(sc.image, zero_filled(sc.kspace, sc.model))


def test_scenario_is_deterministic():
    a, b = SPEC.build(), SPEC.build()
    assert np.array_equal(a.kspace, b.kspace)
    assert np.array_equal(a.model.mask.sampled, b.model.mask.sampled)
    c = SPEC.with_seed(1).build()
    assert not np.array_equal(a.kspace, c.kspace)
    est = replace(SPEC, maps="estimated").build()
    assert est.model.maps.shape == a.model.maps.shape
    assert not np.array_equal(est.model.maps, a.model.maps)
    with pytest.raises(ValueError):
        ScenarioSpec(maps="guess")


def test_ablation_structural_identities():
    sc = SPEC.build()
    x, _ = reconstruct_variant("no_regularizer", sc, CFG)
    assert np.array_equal(x, cg_sense(sc.kspace, sc.model, CFG.lambda_init, CFG.cg_iters))
    a, _ = reconstruct_variant(AblationVariant.NO_TV, sc, CFG)
    b, _ = train(sc.kspace, sc.model, replace(CFG, lambda_s_init=0.0), use_tv=False)
    assert np.array_equal(a, b.x_hat)
    base, _ = reconstruct_variant("baseline", sc, CFG)
    rep, _ = train(sc.kspace, sc.model, CFG)
    assert np.array_equal(base, rep.x_hat)
    nodc, _ = reconstruct_variant("no_dc", sc, CFG)
    rep, _ = train(sc.kspace, sc.model, CFG, use_dc=False)
    assert np.array_equal(nodc, rep.x_hat)
    with pytest.raises(ValueError):
        reconstruct_variant("no_everything", sc, CFG)


def test_run_ablations_rows_and_stats():
    res = run_ablations(list(AblationVariant), SPEC, CFG, seeds=[0, 1])
    assert [r.axis["variant"] for r in res.rows] == [v.value for v in AblationVariant]
    assert len(res.runs) == 8
    for row in res.rows:
        assert row.num_seeds == 2 and row.num_missing == 0
        vals = [r.psnr for r in res.runs if r.label == row.axis["variant"]]
        assert row.psnr_mean == pytest.approx(np.mean(vals))
        assert row.psnr_std == pytest.approx(np.std(vals))
    single = run_ablation("no_regularizer", SPEC, CFG, seeds=[0])
    assert single.rows[0].psnr_std == 0.0 and single.rows[0].ssim_std == 0.0
    with pytest.raises(ValueError):
        run_ablations(["baseline"], SPEC, CFG, seeds=[])


def test_sweep_one_factor_and_cross():
    res = sweep_hyperparams(SPEC, CFG, [0.01, 0.05], [0.1, 0.9, 0.5], seeds=[0])
    assert [tuple(r.axis.values()) for r in res.rows] == [
        (0.01, 0.5), (0.05, 0.5), (0.01, 0.1), (0.01, 0.9), (0.01, 0.5)]
    assert all(np.isfinite(r.psnr_mean) for r in res.rows)
    # (0.01, 0.5) appears twice and both cells agree
    assert res.rows[0].psnr_mean == res.rows[-1].psnr_mean
    cross = sweep_hyperparams(SPEC, CFG, [0.01, 0.05], [0.1, 0.9], seeds=[0], cross=True)
    assert len(cross.rows) == 4
    with pytest.raises(ValueError):
        sweep_hyperparams(SPEC, CFG, [], [0.1], seeds=[0])


def test_sweep_single_point_equals_train():
    res = sweep_hyperparams(SPEC, CFG, [0.02], [0.3], seeds=[0], cross=True)
    sc = SPEC.build()
    rep, _ = train(sc.kspace, sc.model, replace(CFG, lambda_init=0.02, lambda_s_init=0.3),
                   reference=sc.image)
    assert len(res.rows) == 1 and res.rows[0].psnr_mean == rep.psnr


def test_failed_cell_is_missing():
    # lr large enough to blow up the loss right away
    cfg = replace(CFG, lr=50.0, divergence_factor=1.0 + 1e-12, epochs=6)
    res = sweep_hyperparams(SPEC, cfg, [0.01], [0.5], seeds=[0], cross=True)
    row = res.rows[0]
    assert row.num_missing == 1 and math.isnan(row.psnr_mean)
    assert res.runs[0].error.startswith("TrainingDiverged")


def test_best_ignores_missing_and_duplicates():
    rows = [SweepRow({"lambda": v}, p, 0, 0, 0, 0, 1) for v, p in
            [(0.01, 20.0), (0.02, math.nan), (0.03, 25.0), (0.04, 22.0)]]
    res = SweepResult("h", ("lambda",), rows)
    assert res.best() == {"lambda": 0.03}
    dup = SweepResult("h", ("lambda",), rows + [SweepRow({"lambda": 0.03}, 25.0, 0, 0, 0, 0, 1)])
    assert dup.best() == {"lambda": 0.03}
    with pytest.raises(ValueError):
        SweepResult("h", ("lambda",), [rows[1]]).best()


def test_sweep_cg_iters():
    res = sweep_cg_iters(SPEC, CFG, [10, 20])
    assert [r.axis["cg_iters"] for r in res.rows] == [10, 20]
    sc = SPEC.build()
    rep, _ = train(sc.kspace, sc.model, replace(CFG, cg_iters=20), reference=sc.image)
    assert res.row(cg_iters=20).psnr_mean == rep.psnr
    with pytest.raises(ValueError):
        sweep_cg_iters(SPEC, CFG, [0])
    with pytest.raises(KeyError):
        res.row(cg_iters=99)
