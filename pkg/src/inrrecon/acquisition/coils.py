"""Coil sensitivity synthesis and ACS-based estimation."""

import math

import numpy as np

from ..core import as_grid, ifft2c

SUPPORT_FRACTION = 0.05
_EPS = 1e-12


def rss(maps):
    """Root-sum-of-squares over the coil axis."""
    return np.sqrt(np.sum(np.abs(maps) ** 2, axis=0))


def coil_angles(num_coils):
    """Center angles (radians, counter-clockwise from +x) of the simulated coils.

    Offset by half a step so no coil sits exactly on an image axis.
    """
    return 2 * math.pi * (np.arange(num_coils) + 0.5) / num_coils


def _normalized_coords(height, width):
    y = 1.0 - (np.arange(height) + 0.5) * 2.0 / height
    x = (np.arange(width) + 0.5) * 2.0 / width - 1.0
    return np.meshgrid(y, x, indexing="ij")


def synth_sensitivities(num_coils, height, width, radius=1.3, spread=0.9,
                        phase_slope=0.5 * math.pi):
    """Smooth synthetic receive maps normalized to unit RSS.

    Coil ``i`` has a Gaussian magnitude centered on a circle of ``radius``
    (in units of the half field of view) at angle ``coil_angles(n)[i]``,
    times a linear phase ramp along the same direction.
    """
    if num_coils < 1:
        raise ValueError(f"num_coils must be >= 1, got {num_coils}")
    if num_coils == 1:
        return np.ones((1, height, width), dtype=np.complex128)
    yy, xx = _normalized_coords(height, width)
    maps = np.empty((num_coils, height, width), dtype=np.complex128)
    for i, theta in enumerate(coil_angles(num_coils)):
        cx, cy = radius * math.cos(theta), radius * math.sin(theta)
        mag = np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2 * spread**2))
        phase = phase_slope * (xx * math.cos(theta) + yy * math.sin(theta)) + theta
        maps[i] = mag * np.exp(1j * phase)
    return maps / rss(maps)


def acs_window(shape, acs):
    """Separable raised-cosine window over the central ``acs`` x ``acs`` square."""
    h, w = shape

    def taper(n):
        lo = n // 2 - acs // 2
        k = np.arange(n) - n // 2
        win = 0.5 * (1 + np.cos(2 * math.pi * k / (acs + 1)))
        inside = (np.arange(n) >= lo) & (np.arange(n) < lo + acs)
        return np.where(inside, win, 0.0)

    return np.outer(taper(h), taper(w))


def normalize_maps(maps, support=None):
    """Scale maps to unit RSS on ``support`` (everywhere if None) and zero elsewhere."""
    r = rss(maps)
    if support is None:
        support = r > 0
    out = np.where(support, maps / np.maximum(r, _EPS), 0.0)
    return out.astype(np.complex128)


def estimate_sensitivities(ksp, mask):
    """Low-resolution ACS estimate of the coil maps.

    Each coil's k-space is windowed to the calibration square, brought to
    the image domain and divided by the RSS of all coil images. Pixels
    whose low-resolution RSS falls below ``SUPPORT_FRACTION`` of the
    maximum are treated as background and get zero sensitivity.
    """
    if mask.acs_size <= 0:
        raise ValueError("mask has no calibration region (acs = 0)")
    ksp = as_grid(ksp, "ksp")
    if ksp.ndim == 2:
        ksp = ksp[None]
    if ksp.shape[-2:] != mask.shape:
        raise ValueError(f"k-space shape {ksp.shape[-2:]} != mask shape {mask.shape}")
    low = ifft2c(ksp * acs_window(mask.shape, mask.acs_size) * mask.sampled)
    r = rss(low)
    support = r > SUPPORT_FRACTION * r.max()
    return normalize_maps(low, support)
