"""Coordinate network: hash-grid encoding followed by an MLP, rendered on a pixel grid."""

import math
from dataclasses import dataclass, field

import numpy as np

from .hashgrid import HashEncodingConfig, encode, encode_backward, encode_geometry, grid_geometry
from .mlp import mlp_backward, mlp_forward

OUTPUT_WIDTH = 2  # real and imaginary channel


@dataclass
class InrParams:
    """Trainable state: hash tables ``(L, T, F)`` plus MLP weights and biases.

    The same container is used for gradients.
    """

    config: HashEncodingConfig
    tables: np.ndarray
    weights: list = field(default_factory=list)
    biases: list = field(default_factory=list)

    def arrays(self):
        """All parameter arrays in a fixed order (tables, then w/b per layer)."""
        out = [self.tables]
        for w, b in zip(self.weights, self.biases):
            out += [w, b]
        return out

    @property
    def widths(self):
        return [self.weights[0].shape[1]] + [w.shape[0] for w in self.weights]

    def pack(self):
        return np.concatenate([a.ravel() for a in self.arrays()])

    def unpack(self, flat):
        """New parameters with this structure filled from ``flat``."""
        flat = np.asarray(flat, dtype=np.float64)
        sizes = [a.size for a in self.arrays()]
        if flat.size != sum(sizes):
            raise ValueError(f"expected {sum(sizes)} values, got {flat.size}")
        chunks = np.split(flat, np.cumsum(sizes)[:-1])
        shaped = [c.reshape(a.shape).copy() for c, a in zip(chunks, self.arrays())]
        return InrParams(self.config, shaped[0], shaped[1::2], shaped[2::2])

    def zeros_like(self):
        return self.unpack(np.zeros(self.pack().size))

    def copy(self):
        return self.unpack(self.pack())


def init_inr(config, hidden=(64, 64), rng=None):
    """Random initial parameters.

    Hash features are drawn from ``U(-1e-4, 1e-4)``; weights use the
    Glorot-uniform bound ``sqrt(6 / (fan_in + fan_out))`` and biases
    start at zero.
    """
    if rng is None:
        raise ValueError("init_inr needs an rng")
    if any(h <= 0 for h in hidden):
        raise ValueError(f"hidden widths must be positive, got {hidden}")
    tables = rng.uniform(-1e-4, 1e-4, size=(config.levels, config.table_size, config.features))
    widths = [config.output_dim, *hidden, OUTPUT_WIDTH]
    weights, biases = [], []
    for fan_in, fan_out in zip(widths[:-1], widths[1:]):
        bound = math.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(np.zeros(fan_out))
    return InrParams(config, tables, weights, biases)


def hash_encode(v, params):
    """Encode one coordinate pair; returns ``(features, cache)``."""
    cache = encode_geometry(np.asarray(v, dtype=np.float64).reshape(1, 2), params.config)
    return encode(params.tables, cache)[0], cache


def hash_encode_backward(cache, grad_features):
    return encode_backward(cache, np.atleast_2d(grad_features))


@dataclass
class RenderCache:
    shape: tuple
    geometry: object
    mlp_cache: tuple
    weights: list


def render(params, height, width):
    """Evaluate the network at every pixel center.

    Returns the complex ``(H, W)`` image and a cache for
    :func:`render_backward`.
    """
    geom = grid_geometry(height, width, params.config)
    feats = encode(params.tables, geom)
    out, mcache = mlp_forward(feats, params.weights, params.biases)
    z = (out[:, 0] + 1j * out[:, 1]).reshape(height, width)
    return z, RenderCache((height, width), geom, mcache, params.weights)


def render_backward(cache, grad_z, params):
    """Parameter gradient given ``grad_z = dL/dRe(z) + i dL/dIm(z)``."""
    grad_z = np.asarray(grad_z).reshape(-1)
    g_out = np.stack([grad_z.real, grad_z.imag], axis=1)
    gw, gb, gfeat = mlp_backward(cache.mlp_cache, g_out, cache.weights)
    g_tables = encode_backward(cache.geometry, gfeat)
    return InrParams(params.config, g_tables, gw, gb)
