"""Reference reconstructions: zero filling and Tikhonov CG-SENSE."""

import numpy as np

from ..acquisition.encoding import apply_EH
from ..unroll.cg import cg_solve
from ..unroll.train import kspace_scale

CG_SENSE_LAMBDA = 0.01
CG_SENSE_ITERS = 20


def zero_filled(y, model):
    """``E^H y``: coil-combined inverse FFT with unsampled entries at zero."""
    return apply_EH(y, model)


def cg_sense(y, model, lambda0=CG_SENSE_LAMBDA, n_iter=CG_SENSE_ITERS, normalize=True):
    """Solve ``(E^H E + lambda0 I) x = E^H y`` by CG from zero.

    With ``normalize`` the data is scaled to ``max|E^H y| = 1`` first
    (the same scaling training uses) and the result scaled back, so
    ``lambda0`` means the same thing as the DC weight of the unrolled
    network.
    """
    if not np.any(y):
        return np.zeros(model.shape, dtype=np.complex128)
    scale = kspace_scale(y, model) if normalize else 1.0
    z = np.zeros(model.shape, dtype=np.complex128)
    return cg_solve(z, y * scale, model, lambda0, n_iter) / scale
