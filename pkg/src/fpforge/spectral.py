"""Orthonormal 2-D spectral transforms and scaling utilities.

All arrays are channel-major float64: shape (channels, height, width).
The DCT here is the orthonormal type-II transform, applied separably per
channel, so Parseval holds exactly and strengths stay comparable across
image sizes.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError

EPS_DEFAULT = 1e-12


def _as_planes(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[np.newaxis, :, :]
    if arr.ndim != 3:
        raise ValidationError(
            f"{name} must have shape (channels, height, width), got {arr.shape}"
        )
    channels, height, width = arr.shape
    if channels not in (1, 3):
        raise ValidationError(f"{name} must have 1 or 3 channels, got {channels}")
    if height < 1 or width < 1:
        raise ValidationError(f"{name} must be non-empty, got {height}x{width}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} contains non-finite values")
    return arr


@dataclass(frozen=True)
class ImageF:
    """Spatial image: float64 samples, nominal range [0, 255], shape (C, H, W)."""

    samples: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "samples", _as_planes(self.samples, "image"))

    @property
    def channels(self) -> int:
        return self.samples.shape[0]

    @property
    def height(self) -> int:
        return self.samples.shape[1]

    @property
    def width(self) -> int:
        return self.samples.shape[2]

    @classmethod
    def from_hwc(cls, array) -> "ImageF":
        """Build from a (H, W) or (H, W, C) array, e.g. a decoded PNG."""
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim == 2:
            arr = arr[:, :, np.newaxis]
        if arr.ndim != 3:
            raise ValidationError(f"expected a 2-D or 3-D array, got shape {arr.shape}")
        return cls(np.moveaxis(arr, 2, 0))

    def to_hwc(self) -> np.ndarray:
        return np.moveaxis(self.samples, 0, 2)


@dataclass(frozen=True)
class Spectrum:
    """Per-channel 2-D DCT coefficients; index (0, 0) is the DC term."""

    coeffs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _as_planes(self.coeffs, "spectrum"))

    @property
    def channels(self) -> int:
        return self.coeffs.shape[0]

    @property
    def height(self) -> int:
        return self.coeffs.shape[1]

    @property
    def width(self) -> int:
        return self.coeffs.shape[2]


@dataclass(frozen=True)
class MagnitudeSpectrum:
    """Per-channel |DFT| magnitudes, unshifted layout (bin (0, 0) is DC)."""

    magnitudes: np.ndarray

    def __post_init__(self):
        arr = _as_planes(self.magnitudes, "magnitude spectrum")
        if arr.min() < 0:
            raise ValidationError("magnitude spectrum must be non-negative")
        object.__setattr__(self, "magnitudes", arr)

    @property
    def channels(self) -> int:
        return self.magnitudes.shape[0]

    @property
    def height(self) -> int:
        return self.magnitudes.shape[1]

    @property
    def width(self) -> int:
        return self.magnitudes.shape[2]


@lru_cache(maxsize=None)
def _dct_matrix(n: int) -> np.ndarray:
    k = np.arange(n)[:, np.newaxis]
    x = np.arange(n)[np.newaxis, :]
    mat = np.sqrt(2.0 / n) * np.cos(np.pi * (2 * x + 1) * k / (2 * n))
    mat[0, :] = np.sqrt(1.0 / n)
    mat.setflags(write=False)
    return mat


def dct2_raw(planes: np.ndarray) -> np.ndarray:
    """Orthonormal type-II DCT of a (C, H, W) array, per channel."""
    _, height, width = planes.shape
    rows = _dct_matrix(height)
    cols = _dct_matrix(width)
    return rows @ planes @ cols.T


def idct2_raw(coeffs: np.ndarray) -> np.ndarray:
    """Inverse of `dct2_raw`."""
    _, height, width = coeffs.shape
    rows = _dct_matrix(height)
    cols = _dct_matrix(width)
    return rows.T @ coeffs @ cols


def dct2(image: ImageF) -> Spectrum:
    """Per-channel orthonormal 2-D DCT of an image."""
    planes = _as_planes(image.samples, "image")
    return Spectrum(dct2_raw(planes))


def idct2(spectrum: Spectrum) -> ImageF:
    """Exact inverse of `dct2`. The output is not clamped."""
    coeffs = _as_planes(spectrum.coeffs, "spectrum")
    return ImageF(idct2_raw(coeffs))


def fft_magnitude(image: ImageF) -> MagnitudeSpectrum:
    """Per-channel magnitude of the unnormalized 2-D DFT."""
    planes = _as_planes(image.samples, "image")
    return MagnitudeSpectrum(np.abs(np.fft.fft2(planes, axes=(1, 2))))


def log_abs(values: np.ndarray, eps: float) -> np.ndarray:
    return np.log(np.abs(values) + eps)


def log_scale(spectrum: Spectrum, eps: float = EPS_DEFAULT) -> np.ndarray:
    """Element-wise log(|coeff| + eps). Sign information is discarded."""
    if not np.isfinite(eps) or eps <= 0:
        raise ValidationError(f"eps must be > 0, got {eps}")
    return log_abs(spectrum.coeffs, eps)


def clip_view(values, lo: float, hi: float) -> np.ndarray:
    """Element-wise clamp to [lo, hi]."""
    if not lo < hi:
        raise ValidationError(f"clip bounds must satisfy lo < hi, got [{lo}, {hi}]")
    return np.clip(np.asarray(values, dtype=np.float64), lo, hi)
