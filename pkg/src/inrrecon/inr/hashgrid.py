"""Multi-resolution 2D hash-grid encoding with an exact backward pass."""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

HASH_PRIME = 2654435761


@dataclass(frozen=True)
class HashEncodingConfig:
    """Hash-grid hyperparameters.

    Attributes
    ----------
    levels : int
        Number of resolution levels ``L``.
    table_size : int
        Entries per level ``T``.
    features : int
        Feature dimension per entry ``F``.
    base_resolution : int
        Coarsest grid resolution ``N_min``.
    growth : float
        Per-level growth factor ``b > 1`` (``b == 1`` allowed for ``L == 1``).
    """

    levels: int = 8
    table_size: int = 2**14
    features: int = 2
    base_resolution: int = 8
    growth: float = 1.5

    def __post_init__(self):
        for name in ("levels", "table_size", "features", "base_resolution"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.growth < 1 or (self.growth == 1 and self.levels > 1):
            raise ValueError(f"growth must be > 1, got {self.growth}")

    @property
    def resolutions(self):
        return tuple(int(math.floor(self.base_resolution * self.growth**lvl + 1e-9))
                     for lvl in range(self.levels))

    @property
    def output_dim(self):
        return self.levels * self.features

    @property
    def num_params(self):
        return self.levels * self.table_size * self.features

    @classmethod
    def for_image(cls, height, width, levels=8, table_size=2**14, features=2,
                  base_resolution=8):
        """Config whose finest level is about half the larger image side."""
        finest = max(height, width) / 2
        if levels == 1 or finest <= base_resolution:
            growth = 1.0 if levels == 1 else 1.0 + 1e-6
        else:
            growth = (finest / base_resolution) ** (1.0 / (levels - 1))
        return cls(levels, table_size, features, base_resolution, growth)


@dataclass
class EncodingCache:
    """Corner slots and bilinear weights of a batch of coordinates.

    ``slots`` index the flattened ``(L * T)`` table, shape ``(P, L, 4)``;
    ``weights`` has the same shape. ``clamped`` flags inputs that were
    outside the unit square.
    """

    slots: np.ndarray
    weights: np.ndarray
    clamped: np.ndarray
    config: HashEncodingConfig


def _level_slots(ix, iy, res, table_size):
    if (res + 1) ** 2 <= table_size:
        return iy * (res + 1) + ix
    h = ix.astype(np.uint64) ^ (iy.astype(np.uint64) * np.uint64(HASH_PRIME))
    return (h % np.uint64(table_size)).astype(np.int64)


def encode_geometry(coords, config):
    """Locate corner slots and weights for ``coords`` of shape ``(P, 2)``.

    Coordinates are ``(v_x, v_y)`` in ``[0, 1]``; values outside are
    clamped and flagged. The result depends only on geometry, so a fixed
    pixel grid can reuse it across parameter updates.
    """
    coords = np.atleast_2d(np.asarray(coords, dtype=np.float64))
    clamped = np.any((coords < 0) | (coords > 1), axis=1)
    v = np.clip(coords, 0.0, 1.0)
    n = v.shape[0]
    slots = np.empty((n, config.levels, 4), dtype=np.int64)
    weights = np.empty((n, config.levels, 4))
    for lvl, res in enumerate(config.resolutions):
        pos = v * res
        cell = np.minimum(np.floor(pos), res - 1).astype(np.int64)
        fx, fy = (pos - cell).T
        ix, iy = cell.T
        corners = ((ix, iy), (ix + 1, iy), (ix, iy + 1), (ix + 1, iy + 1))
        for k, (cx, cy) in enumerate(corners):
            slots[:, lvl, k] = lvl * config.table_size + _level_slots(
                cx, cy, res, config.table_size)
        weights[:, lvl, 0] = (1 - fx) * (1 - fy)
        weights[:, lvl, 1] = fx * (1 - fy)
        weights[:, lvl, 2] = (1 - fx) * fy
        weights[:, lvl, 3] = fx * fy
    return EncodingCache(slots, weights, clamped, config)


@lru_cache(maxsize=16)
def grid_geometry(height, width, config):
    """Encoding cache for the pixel-center coordinates of an ``H x W`` grid.

    Pixel ``(r, c)`` maps to ``((c + 0.5) / W, (r + 0.5) / H)``, row-major.
    """
    return encode_geometry(pixel_coords(height, width), config)


def pixel_coords(height, width):
    rr, cc = np.meshgrid(np.arange(height), np.arange(width), indexing="ij")
    return np.stack([(cc.ravel() + 0.5) / width, (rr.ravel() + 0.5) / height], axis=1)


def encode(tables, cache):
    """Interpolated features ``(P, L * F)`` from tables of shape ``(L, T, F)``."""
    flat = tables.reshape(-1, tables.shape[-1])
    corner = flat[cache.slots]  # (P, L, 4, F)
    feats = np.einsum("plk,plkf->plf", cache.weights, corner)
    return feats.reshape(feats.shape[0], -1)


def encode_backward(cache, grad_features):
    """Accumulate ``grad_features`` (``(P, L * F)``) into a dense table gradient.

    Every corner slot receives the level gradient times its bilinear
    weight; slots hit more than once (hash collisions, shared vertices)
    sum their contributions.
    """
    cfg = cache.config
    g = np.asarray(grad_features, dtype=np.float64).reshape(-1, cfg.levels, cfg.features)
    idx = cache.slots.ravel()
    size = cfg.levels * cfg.table_size
    out = np.empty((size, cfg.features))
    for f in range(cfg.features):
        contrib = cache.weights * g[:, :, f, None]
        out[:, f] = np.bincount(idx, weights=contrib.ravel(), minlength=size)
    return out.reshape(cfg.levels, cfg.table_size, cfg.features)
