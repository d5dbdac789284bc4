"""Modified Shepp-Logan phantom."""

import numpy as np

# intensity, semi-axis x, semi-axis y, center x, center y, rotation (deg)
_ELLIPSES = (
    (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
    (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
    (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
    (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
    (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
    (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
    (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
    (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
    (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
    (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
)


def shepp_logan(height, width, phase=0.0):
    """Rasterize the 10-ellipse modified Shepp-Logan phantom.

    Pixel centers are point-sampled on ``[-1, 1]^2`` with +y pointing up
    (row 0 is the top). ``phase`` is the peak of an optional smooth
    quadratic phase, in radians, reached at the field-of-view corners.
    """
    if height < 16 or width < 16:
        raise ValueError(f"phantom needs both dimensions >= 16, got {height}x{width}")
    y = 1.0 - (np.arange(height) + 0.5) * 2.0 / height
    x = (np.arange(width) + 0.5) * 2.0 / width - 1.0
    yy, xx = np.meshgrid(y, x, indexing="ij")
    img = np.zeros((height, width))
    for value, a, b, x0, y0, deg in _ELLIPSES:
        t = np.deg2rad(deg)
        dx, dy = xx - x0, yy - y0
        u = dx * np.cos(t) + dy * np.sin(t)
        v = -dx * np.sin(t) + dy * np.cos(t)
        img[(u / a) ** 2 + (v / b) ** 2 <= 1.0] += value
    # overlapping negative ellipses leave -1e-17 style residue
    img = np.clip(img, 0.0, None)
    out = img.astype(np.complex128)
    if phase:
        out *= np.exp(1j * phase * 0.5 * (xx**2 + yy**2))
    return out
