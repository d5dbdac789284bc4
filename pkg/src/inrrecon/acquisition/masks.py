"""Cartesian and rasterized non-Cartesian sampling masks."""

import math
from dataclasses import dataclass

import numpy as np

LINE_PATTERNS = ("random-lines", "uniform-lines")
POINT_PATTERNS = ("radial", "spiral")
PATTERNS = LINE_PATTERNS + POINT_PATTERNS
# label for masks loaded from files rather than generated here
CUSTOM = "custom"

GOLDEN_ANGLE = math.pi / ((1 + math.sqrt(5)) / 2)
# realized rate must land this close to 1/R for radial and spiral masks
RATE_TOLERANCE = 0.01


@dataclass(frozen=True)
class SamplingMask:
    """Binary k-space sampling indicator.

    Attributes
    ----------
    pattern : str
        One of ``PATTERNS``, or ``CUSTOM`` for externally supplied masks.
    sampled : ndarray
        ``(H, W)`` float64 array of zeros and ones.
    acs_size : int
        Number of fully sampled central phase-encode lines for line
        patterns, side of the fully sampled central square otherwise.
    """

    pattern: str
    sampled: np.ndarray
    acs_size: int

    def __post_init__(self):
        if self.pattern not in PATTERNS and self.pattern != CUSTOM:
            raise ValueError(f"unknown pattern {self.pattern!r}")
        sampled = np.asarray(self.sampled, dtype=np.float64)
        if sampled.ndim != 2:
            raise ValueError("mask must be 2D")
        if not np.all((sampled == 0) | (sampled == 1)):
            raise ValueError("mask entries must be 0 or 1")
        if self.acs_size < 0:
            raise ValueError(f"acs_size must be >= 0, got {self.acs_size}")
        sampled = sampled.copy()
        sampled.setflags(write=False)
        object.__setattr__(self, "sampled", sampled)

    @property
    def shape(self):
        return self.sampled.shape

    @property
    def undersampling_rate(self):
        return float(self.sampled.sum() / self.sampled.size)

    @property
    def acceleration(self):
        return 1.0 / self.undersampling_rate

    @property
    def num_lines(self):
        """Sampled phase-encode columns (meaningful for line patterns)."""
        return int(np.count_nonzero(self.sampled.any(axis=0)))

    def acs_slices(self):
        """Row and column slices of the central calibration square."""
        h, w = self.shape
        a = self.acs_size
        return (slice(h // 2 - a // 2, h // 2 - a // 2 + a),
                slice(w // 2 - a // 2, w // 2 - a // 2 + a))


def num_sampled_lines(width, accel):
    """Phase-encode line budget ``floor(width / R)``."""
    # the epsilon keeps exact ratios such as 320 / 10 from flooring down
    return int(math.floor(width / accel + 1e-9))


def gen_mask(pattern, height, width, accel, acs, rng=None):
    """Generate a sampling mask.

    Parameters
    ----------
    pattern : str
        ``"random-lines"``, ``"uniform-lines"``, ``"radial"`` or ``"spiral"``.
    height, width : int
        Grid size. Lines run along the height axis, one per column.
    accel : float
        Target acceleration ``R >= 1``.
    acs : int
        Calibration size (central lines or central square side).
    rng : numpy.random.Generator, optional
        Needed by ``"random-lines"`` only.

    Returns
    -------
    SamplingMask

    Raises
    ------
    ValueError
        On invalid sizes, an ACS larger than the line budget, or a target
        density the trajectory cannot reach within ``RATE_TOLERANCE``.
    """
    if pattern not in PATTERNS:
        raise ValueError(f"unknown pattern {pattern!r}; expected one of {PATTERNS}")
    if height <= 0 or width <= 0:
        raise ValueError(f"grid dimensions must be positive, got {height}x{width}")
    if accel < 1:
        raise ValueError(f"acceleration must be >= 1, got {accel}")
    if acs < 0:
        raise ValueError(f"acs must be non-negative, got {acs}")

    if accel == 1:
        return SamplingMask(pattern, np.ones((height, width)), acs)

    if pattern in LINE_PATTERNS:
        if acs >= width:
            raise ValueError(f"acs ({acs}) must be smaller than width ({width})")
        cols = _line_columns(pattern, width, accel, acs, rng)
        sampled = np.zeros((height, width))
        sampled[:, cols] = 1.0
        return SamplingMask(pattern, sampled, acs)

    if acs > min(height, width):
        raise ValueError(f"acs ({acs}) exceeds grid size {height}x{width}")
    if pattern == "radial":
        sampled = _tune_density(_radial_mask, height, width, accel, acs,
                                lo=1, hi=8 * max(height, width), integer=True)
    else:
        sampled = _tune_density(_spiral_mask, height, width, accel, acs,
                                lo=0.25, hi=2.0 * max(height, width), integer=False)
    return SamplingMask(pattern, sampled, acs)


def _line_columns(pattern, width, accel, acs, rng):
    n_lines = num_sampled_lines(width, accel)
    if n_lines < acs:
        raise ValueError(
            f"line budget floor({width}/{accel}) = {n_lines} is smaller than acs = {acs}")
    start = width // 2 - acs // 2
    acs_cols = np.arange(start, start + acs)
    outer = np.setdiff1d(np.arange(width), acs_cols)
    n_extra = n_lines - acs
    if pattern == "random-lines":
        if rng is None:
            raise ValueError("random-lines needs an rng")
        extra = rng.choice(outer, size=n_extra, replace=False)
    else:
        pos = np.floor((np.arange(n_extra) + 0.5) * outer.size / max(n_extra, 1))
        extra = outer[pos.astype(int)] if n_extra else np.array([], dtype=int)
    return np.sort(np.concatenate([acs_cols, extra]).astype(int))


def _acs_square(height, width, acs):
    sampled = np.zeros((height, width))
    r0, c0 = height // 2 - acs // 2, width // 2 - acs // 2
    sampled[r0:r0 + acs, c0:c0 + acs] = 1.0
    return sampled


def _rasterize(sampled, rows, cols):
    h, w = sampled.shape
    r = np.rint(rows).astype(int) + h // 2
    c = np.rint(cols).astype(int) + w // 2
    keep = (r >= 0) & (r < h) & (c >= 0) & (c < w)
    sampled[r[keep], c[keep]] = 1.0
    return sampled


def _radial_mask(height, width, acs, n_spokes):
    sampled = _acs_square(height, width, acs)
    r_max = 0.5 * math.hypot(height, width)
    t = np.arange(-r_max, r_max + 0.25, 0.25)
    angles = GOLDEN_ANGLE * np.arange(int(n_spokes))
    rows = -np.outer(np.sin(angles), t)
    cols = np.outer(np.cos(angles), t)
    return _rasterize(sampled, rows.ravel(), cols.ravel())


def _spiral_mask(height, width, acs, turns):
    """Single-arm Archimedean spiral ``r = a * theta`` with equal arc-length samples."""
    sampled = _acs_square(height, width, acs)
    r_max = 0.5 * math.hypot(height, width)
    theta_max = 2 * math.pi * turns
    a = r_max / theta_max
    theta = np.linspace(0.0, theta_max, 200_000)
    arc = 0.5 * a * (theta * np.sqrt(1 + theta**2) + np.arcsinh(theta))
    s = np.arange(0.0, arc[-1], 0.25)
    th = np.interp(s, arc, theta)
    r = a * th
    return _rasterize(sampled, -r * np.sin(th), r * np.cos(th))


def _tune_density(builder, height, width, accel, acs, lo, hi, integer):
    target = 1.0 / accel

    def rate(p):
        m = builder(height, width, acs, p)
        return m.sum() / m.size, m

    r_lo, m_lo = rate(lo)
    r_hi, m_hi = rate(hi)
    if not (r_lo - RATE_TOLERANCE <= target <= r_hi + RATE_TOLERANCE):
        raise ValueError(
            f"target rate {target:.4f} outside achievable range "
            f"[{r_lo:.4f}, {r_hi:.4f}] for this trajectory and acs={acs}")
    best = min((abs(r_lo - target), m_lo), (abs(r_hi - target), m_hi),
               key=lambda item: item[0])
    for _ in range(60):
        if integer and hi - lo <= 1:
            break
        mid = (lo + hi) // 2 if integer else 0.5 * (lo + hi)
        r_mid, m_mid = rate(mid)
        if abs(r_mid - target) < best[0]:
            best = (abs(r_mid - target), m_mid)
        if r_mid < target:
            lo = mid
        else:
            hi = mid
    if best[0] > RATE_TOLERANCE:
        raise ValueError(
            f"could not reach rate {target:.4f} within {RATE_TOLERANCE}; "
            f"achievable range [{r_lo:.4f}, {r_hi:.4f}]")
    return best[1]
