"""Complex grids, centered orthonormal FFTs and seeded random streams.

Images, k-space planes and masks are plain ``numpy`` arrays. A single
image is a ``(H, W)`` complex128 array; multi-coil data carries a leading
coil axis ``(C, H, W)``. All transforms act on the last two axes.
"""

import numpy as np
import scipy.fft

_AXES = (-2, -1)


def as_grid(x, name="grid"):
    """Return ``x`` as a complex128 array, checking shape and finiteness."""
    x = np.asarray(x, dtype=np.complex128)
    if x.ndim < 2:
        raise ValueError(f"{name} must have at least 2 dimensions, got {x.ndim}")
    if 0 in x.shape[-2:]:
        raise ValueError(f"{name} has a zero-sized dimension: {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite values")
    return x


def fft2c(img):
    """Centered, orthonormal 2D DFT over the last two axes.

    The zero-frequency sample sits at index ``(H // 2, W // 2)`` and the
    transform is unitary, so ``||fft2c(x)|| == ||x||``.
    """
    img = as_grid(img, "img")
    tmp = scipy.fft.ifftshift(img, axes=_AXES)
    tmp = scipy.fft.fft2(tmp, axes=_AXES, norm="ortho")
    return scipy.fft.fftshift(tmp, axes=_AXES)


def ifft2c(ksp):
    """Inverse of :func:`fft2c`."""
    ksp = as_grid(ksp, "ksp")
    tmp = scipy.fft.ifftshift(ksp, axes=_AXES)
    tmp = scipy.fft.ifft2(tmp, axes=_AXES, norm="ortho")
    return scipy.fft.fftshift(tmp, axes=_AXES)


def make_rng(seed):
    """Seeded PCG64 generator; identical seeds give identical streams."""
    seed = int(seed)
    if seed < 0 or seed >= 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def rng_uniform(rng, n):
    """Draw ``n`` values from ``[0, 1)``."""
    if n < 0:
        raise ValueError(f"n must be non-negative, got {n}")
    return rng.random(int(n))


def vdot(a, b):
    """Complex inner product ``sum(conj(a) * b)`` over all entries."""
    return np.vdot(np.ravel(a), np.ravel(b))
