"""Conjugate-gradient data consistency and its adjoint."""

import numpy as np
import scipy.fft

from ..acquisition.encoding import apply_EH
from ..core import as_grid

_AXES = (-2, -1)


class SolverError(RuntimeError):
    """Raised when a CG iterate stops being finite."""


def solve_normal(rhs, model, lam, n_iter, tol=1e-10, history=None):
    """Run CG on ``(E^H E + lam I) x = rhs`` from ``x = 0``.

    Stops after ``n_iter`` iterations or once the residual norm drops
    below ``tol * ||rhs||``. When ``history`` is a list, residual norms
    (starting with ``||rhs||``) are appended to it.
    """
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if n_iter < 1:
        raise ValueError(f"n_iter must be >= 1, got {n_iter}")
    b = scipy.fft.ifftshift(rhs, axes=_AXES)
    x = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = np.vdot(r, r).real
    stop = tol * np.sqrt(rs)
    if history is not None:
        history.append(np.sqrt(rs))
    for it in range(1, n_iter + 1):
        if np.sqrt(rs) <= stop or rs == 0:
            break
        ap = model.gram_shifted(p) + lam * p
        alpha = rs / np.vdot(p, ap).real
        x += alpha * p
        r -= alpha * ap
        rs_new = np.vdot(r, r).real
        if not (np.isfinite(rs_new) and np.isfinite(alpha)):
            raise SolverError(f"CG produced a non-finite value at iteration {it}")
        if history is not None:
            history.append(np.sqrt(rs_new))
        p = r + (rs_new / rs) * p
        rs = rs_new
    return scipy.fft.fftshift(x, axes=_AXES)


def cg_solve(z, y, model, lam, n_iter, tol=1e-10):
    """Data-consistency update ``(E^H E + lam I)^-1 (E^H y + lam z)``."""
    z = as_grid(z, "z")
    return solve_normal(apply_EH(y, model) + lam * z, model, lam, n_iter, tol)


def dc_backward(grad_x, x, z, model, lam, n_iter, tol=1e-10):
    """Gradients of a loss through :func:`cg_solve` at its solution.

    Uses the implicit derivative of the normal equations: with
    ``A = E^H E + lam I`` and ``w = A^-1 grad_x`` (one fresh CG solve),
    ``grad_z = lam * w`` and ``grad_lam = Re<w, z - x>``.
    """
    grad_x = as_grid(grad_x, "grad_x")
    if not np.any(grad_x):
        return np.zeros_like(grad_x), 0.0
    w = solve_normal(grad_x, model, lam, n_iter, tol)
    return lam * w, float(np.vdot(w, z - x).real)
