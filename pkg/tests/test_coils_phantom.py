import math

import numpy as np
import pytest

from inrrecon.acquisition import (AcquisitionModel, apply_E, estimate_sensitivities, gen_mask,
                                  rss, shepp_logan, synth_sensitivities)
from inrrecon.acquisition.coils import coil_angles
from inrrecon.core import fft2c, make_rng


def test_single_coil_map_is_ones():
    maps = synth_sensitivities(1, 32, 32)
    assert maps.shape == (1, 32, 32)
    np.testing.assert_allclose(np.abs(maps), 1.0)


def test_rss_normalized():
    maps = synth_sensitivities(8, 128, 128)
    assert np.max(np.abs(rss(maps) - 1)) < 1e-6
    assert np.all(np.isfinite(maps))


def test_coil_peaks_in_their_quadrant():
    h = w = 128
    maps = synth_sensitivities(8, h, w)
    for m, theta in zip(maps, coil_angles(8)):
        r, c = np.unravel_index(np.argmax(np.abs(m)), m.shape)
        # +x to the right, +y up (row 0 on top)
        x_side = np.sign(c + 0.5 - w / 2)
        y_side = np.sign(h / 2 - (r + 0.5))
        assert x_side == np.sign(math.cos(theta))
        assert y_side == np.sign(math.sin(theta))


def test_estimate_single_coil_unit_map():
    x = shepp_logan(64, 64)
    model = AcquisitionModel(np.ones((1, 64, 64)), gen_mask("random-lines", 64, 64, 1, 16))
    est = estimate_sensitivities(apply_E(x, model), model.mask)
    support = rss(est) > 0
    assert support.sum() > 0.3 * support.size
    np.testing.assert_allclose(np.abs(est[0][support]), 1.0, atol=1e-12)


def test_estimate_matches_generating_maps_full_sampling():
    x = shepp_logan(128, 128)
    maps = synth_sensitivities(8, 128, 128)
    model = AcquisitionModel(maps, gen_mask("random-lines", 128, 128, 1, 32))
    est = estimate_sensitivities(apply_E(x, model), model.mask)
    support = rss(est) > 0
    err = np.abs(est - maps)[:, support].mean()
    assert err < 0.05


def test_estimate_rss_on_support_undersampled():
    rng = make_rng(0)
    x = shepp_logan(128, 128)
    model = AcquisitionModel(synth_sensitivities(8, 128, 128),
                             gen_mask("random-lines", 128, 128, 4, 16, rng))
    est = estimate_sensitivities(apply_E(x, model), model.mask)
    r = rss(est)
    support = r > 0
    assert np.max(np.abs(r[support] - 1)) < 1e-6


def test_estimate_needs_acs():
    model = AcquisitionModel(np.ones((1, 32, 32)), gen_mask("uniform-lines", 32, 32, 4, 0))
    with pytest.raises(ValueError, match="acs"):
        estimate_sensitivities(np.ones((1, 32, 32)), model.mask)


def test_phantom_range_and_background():
    img = shepp_logan(128, 128)
    assert np.all(img.imag == 0)
    assert img.real.max() == pytest.approx(1.0)
    assert img.real.min() >= 0
    assert img[0, 0] == 0 and img[-1, -1] == 0
    assert img[64, 64].real > 0


@pytest.mark.parametrize("shape", [(16, 16), (37, 53), (128, 96), (256, 256)])
def test_phantom_bounded(shape):
    img = shepp_logan(*shape).real
    assert 0 <= img.min() and img.max() <= 1.02


def test_phantom_resolution_consistency():
    coarse = shepp_logan(128, 128).real
    fine = shepp_logan(256, 256).real.reshape(128, 2, 128, 2).mean(axis=(1, 3))
    assert np.abs(coarse - fine).mean() < 0.02


def test_phantom_optional_phase():
    img = shepp_logan(64, 64, phase=1.0)
    assert np.any(np.abs(img.imag) > 0)
    np.testing.assert_allclose(np.abs(img), shepp_logan(64, 64).real, atol=1e-12)


def test_phantom_too_small():
    with pytest.raises(ValueError):
        shepp_logan(8, 64)


def test_fully_sampled_unit_coil_is_fft():
    x = shepp_logan(32, 32)
    model = AcquisitionModel(np.ones((1, 32, 32)), gen_mask("random-lines", 32, 32, 1, 4))
    np.testing.assert_allclose(apply_E(x, model)[0], fft2c(x), atol=1e-14)
