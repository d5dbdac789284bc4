"""Self-supervised training losses.

Gradients of real losses with respect to complex arrays follow the
convention ``dL/dRe + i dL/dIm``.
"""

import numpy as np

from ..acquisition.encoding import apply_E, apply_EH


def _unit_phase(r):
    mag = np.abs(r)
    return np.divide(r, mag, out=np.zeros_like(r), where=mag > 0)


def loss_dc(y, y_hat):
    """Normalized l1 + l2 k-space misfit and its gradient in ``y_hat``.

    ``||y - y_hat||_2 / ||y||_2 + ||y - y_hat||_1 / ||y||_1``. Only
    sampled entries can be non-zero in either argument, so the sums run
    over the sampled locations.
    """
    y = np.asarray(y)
    n2 = np.linalg.norm(y.ravel())
    n1 = np.abs(y).sum()
    if n2 == 0 or n1 == 0:
        raise ValueError("measured k-space is all zero; loss normalization undefined")
    r = y - y_hat
    r2 = np.linalg.norm(r.ravel())
    value = r2 / n2 + np.abs(r).sum() / n1
    grad = -_unit_phase(r) / n1
    if r2 > 0:
        grad -= r / (r2 * n2)
    return float(value), grad


def loss_tv(x):
    """Anisotropic TV: summed complex moduli of vertical and horizontal differences."""
    x = np.asarray(x)
    dv = x[1:, :] - x[:-1, :]
    dh = x[:, 1:] - x[:, :-1]
    value = np.abs(dv).sum() + np.abs(dh).sum()
    gv, gh = _unit_phase(dv), _unit_phase(dh)
    grad = np.zeros_like(x, dtype=np.complex128)
    grad[1:, :] += gv
    grad[:-1, :] -= gv
    grad[:, 1:] += gh
    grad[:, :-1] -= gh
    return float(value), grad


def total_loss(y, x_hat, model, lambda_s, tv_weight=1.0):
    """``L_DC(y, E x_hat) + lambda_s * tv_weight * L_TV(x_hat)``.

    ``tv_weight`` is a fixed normalization of the TV sum (1 keeps the raw
    sum, ``1 / (H * W)`` makes it a per-pixel mean).

    Returns
    -------
    value : float
    grad_x : ndarray
        Gradient with respect to ``x_hat``.
    grad_lambda_s : float
        Equal to the weighted TV value.
    parts : dict
        ``{"dc": ..., "tv": ...}``.
    """
    dc, g_yhat = loss_dc(y, apply_E(x_hat, model))
    tv, g_tv = loss_tv(x_hat)
    tv *= tv_weight
    grad_x = apply_EH(g_yhat, model) + (lambda_s * tv_weight) * g_tv
    return dc + lambda_s * tv, grad_x, tv, {"dc": dc, "tv": tv}
