"""Hash-encoded coordinate network used as the image regularizer."""

from .hashgrid import HashEncodingConfig, encode, encode_backward, encode_geometry, pixel_coords
from .mlp import mlp_backward, mlp_forward
from .network import (InrParams, hash_encode, hash_encode_backward, init_inr, render,
                      render_backward)

__all__ = [
    "HashEncodingConfig",
    "InrParams",
    "encode",
    "encode_backward",
    "encode_geometry",
    "hash_encode",
    "hash_encode_backward",
    "init_inr",
    "mlp_backward",
    "mlp_forward",
    "pixel_coords",
    "render",
    "render_backward",
]
