"""Multi-coil Cartesian encoding operator and its adjoint."""

from dataclasses import dataclass, field

import numpy as np
import scipy.fft

from ..core import as_grid, fft2c, ifft2c
from .masks import SamplingMask

_AXES = (-2, -1)


@dataclass(frozen=True)
class AcquisitionModel:
    """Coil maps plus sampling mask: everything ``E`` and ``E^H`` need.

    ``maps`` has shape ``(C, H, W)``. The shifted copies are used by
    :meth:`gram_shifted`, which evaluates ``E^H E`` without any fftshift
    by working in ifftshift-ed image coordinates.
    """

    maps: np.ndarray
    mask: SamplingMask
    _maps_s: np.ndarray = field(init=False, repr=False, compare=False)
    _maps_s_conj: np.ndarray = field(init=False, repr=False, compare=False)
    _mask_s: np.ndarray = field(init=False, repr=False, compare=False)
    _columns_only: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        maps = as_grid(self.maps, "maps")
        if maps.ndim == 2:
            maps = maps[None]
        if maps.ndim != 3:
            raise ValueError(f"maps must be (C, H, W), got shape {maps.shape}")
        if maps.shape[1:] != self.mask.shape:
            raise ValueError(f"maps shape {maps.shape[1:]} != mask shape {self.mask.shape}")
        maps = maps.copy()
        maps.setflags(write=False)
        object.__setattr__(self, "maps", maps)
        maps_s = scipy.fft.ifftshift(maps, axes=_AXES)
        object.__setattr__(self, "_maps_s", maps_s)
        object.__setattr__(self, "_maps_s_conj", maps_s.conj())
        sampled = self.mask.sampled
        # whole phase-encode columns: the readout FFT cancels inside E^H E
        columns_only = bool(np.all(sampled == sampled[:1]))
        object.__setattr__(self, "_columns_only", columns_only)
        mask_s = scipy.fft.ifftshift(sampled[0] if columns_only else sampled)
        object.__setattr__(self, "_mask_s", mask_s)

    @property
    def shape(self):
        return self.mask.shape

    @property
    def num_coils(self):
        return self.maps.shape[0]

    def gram_shifted(self, u):
        """``P E^H E P^T u`` where ``P`` is ifftshift on the image grid."""
        if self._columns_only:
            coil = scipy.fft.fft(self._maps_s * u, axis=-1)
            coil *= self._mask_s
            coil = scipy.fft.ifft(coil, axis=-1, overwrite_x=True)
        else:
            coil = scipy.fft.fft2(self._maps_s * u, axes=_AXES)
            coil *= self._mask_s
            coil = scipy.fft.ifft2(coil, axes=_AXES, overwrite_x=True)
        return np.einsum("chw,chw->hw", self._maps_s_conj, coil)


def _check_image(x, model):
    x = as_grid(x, "x")
    if x.shape != model.shape:
        raise ValueError(f"image shape {x.shape} != model shape {model.shape}")
    return x


def _check_kspace(y, model):
    y = as_grid(y, "y")
    if y.shape != model.maps.shape:
        raise ValueError(f"k-space shape {y.shape} != expected {model.maps.shape}")
    return y


def apply_E(x, model):
    """Forward encoding: per coil ``mask * fft2c(C_i * x)``."""
    x = _check_image(x, model)
    return model.mask.sampled * fft2c(model.maps * x)


def apply_EH(y, model):
    """Adjoint encoding: ``sum_i conj(C_i) * ifft2c(mask * y_i)``."""
    y = _check_kspace(y, model)
    return np.sum(model.maps.conj() * ifft2c(model.mask.sampled * y), axis=0)


def simulate_acquisition(x, model, noise_sigma, rng):
    """Noisy undersampled multi-coil k-space of image ``x``.

    Complex Gaussian noise with standard deviation ``noise_sigma`` per real
    and imaginary component is added at sampled locations only.
    """
    if noise_sigma < 0:
        raise ValueError(f"noise_sigma must be >= 0, got {noise_sigma}")
    y = apply_E(x, model)
    if noise_sigma == 0:
        return y
    noise = rng.standard_normal(y.shape) + 1j * rng.standard_normal(y.shape)
    return y + noise_sigma * model.mask.sampled * noise
