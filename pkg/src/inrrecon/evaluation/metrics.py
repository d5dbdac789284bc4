"""PSNR and SSIM on magnitude images."""

import math

import numpy as np
from scipy.ndimage import correlate1d

# reported when the two images are identical
PSNR_CAP = math.inf
PSNR_TABLE_CAP = 999.0

SSIM_WIN = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _magnitudes(ref, test):
    ref, test = np.abs(np.asarray(ref)), np.abs(np.asarray(test))
    if ref.shape != test.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {test.shape}")
    return ref, test


def psnr(ref, test):
    """``20 log10(max|ref| / RMSE)`` in dB; ``PSNR_CAP`` for identical inputs."""
    ref, test = _magnitudes(ref, test)
    peak = ref.max()
    if peak == 0:
        raise ValueError("reference image is identically zero")
    rmse = math.sqrt(np.mean((ref - test) ** 2))
    if rmse == 0:
        return PSNR_CAP
    return 20.0 * math.log10(peak / rmse)


def _gaussian_taps():
    k = np.arange(SSIM_WIN) - SSIM_WIN // 2
    taps = np.exp(-(k**2) / (2 * SSIM_SIGMA**2))
    return taps / taps.sum()


def _filter_valid(img, taps):
    half = SSIM_WIN // 2
    out = correlate1d(img, taps, axis=0, mode="constant")
    out = correlate1d(out, taps, axis=1, mode="constant")
    return out[half:-half, half:-half]


def ssim(ref, test, data_range=None):
    """Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5).

    The dynamic range defaults to ``max|ref|``. Statistics are averaged
    over window positions that lie fully inside the image.
    """
    ref, test = _magnitudes(ref, test)
    if min(ref.shape) < SSIM_WIN:
        raise ValueError(f"images must be at least {SSIM_WIN}x{SSIM_WIN}, got {ref.shape}")
    if data_range is None:
        data_range = ref.max()
    c1 = (SSIM_K1 * data_range) ** 2
    c2 = (SSIM_K2 * data_range) ** 2
    taps = _gaussian_taps()
    mu_x = _filter_valid(ref, taps)
    mu_y = _filter_valid(test, taps)
    sxx = _filter_valid(ref * ref, taps) - mu_x**2
    syy = _filter_valid(test * test, taps) - mu_y**2
    sxy = _filter_valid(ref * test, taps) - mu_x * mu_y
    num = (2 * mu_x * mu_y + c1) * (2 * sxy + c2)
    den = (mu_x**2 + mu_y**2 + c1) * (sxx + syy + c2)
    return float(np.mean(num / den))
