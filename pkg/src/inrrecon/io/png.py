"""8-bit grayscale PNG export of magnitude images."""

import io

import numpy as np
from PIL import Image

from .arrays import atomic_write_bytes


def to_uint8(grid, window=None):
    """Window ``|grid|`` linearly to 0..255 with round-half-up.

    The default window is ``(0, max|grid|)``; with it an all-zero image
    is black and any other constant image is mid gray.
    """
    mag = np.abs(np.asarray(grid))
    if mag.ndim != 2 or mag.size == 0:
        raise ValueError(f"expected a non-empty 2D image, got shape {mag.shape}")
    if not np.all(np.isfinite(mag)):
        raise ValueError("image contains non-finite values")
    if window is None:
        peak = float(mag.max())
        if peak == 0:
            return np.zeros(mag.shape, dtype=np.uint8)
        if float(mag.min()) == peak:
            return np.full(mag.shape, 128, dtype=np.uint8)
        lo, hi = 0.0, peak
    else:
        lo, hi = (float(v) for v in window)
        if not hi > lo:
            raise ValueError(f"window must satisfy lo < hi, got ({lo}, {hi})")
    scaled = (mag - lo) / (hi - lo) * 255.0
    return np.floor(np.clip(scaled, 0.0, 255.0) + 0.5).astype(np.uint8)


def png_bytes(grid, window=None):
    buf = io.BytesIO()
    Image.fromarray(to_uint8(grid, window), mode="L").save(buf, format="PNG", optimize=False)
    return buf.getvalue()


def export_png(grid, path, window=None):
    """Write ``|grid|`` as an 8-bit grayscale PNG; identical input gives identical bytes."""
    try:
        atomic_write_bytes(path, png_bytes(grid, window))
    except OSError as exc:
        raise OSError(f"cannot write PNG {path}: {exc.strerror or exc}") from exc
