"""Baseline image perturbations used for attack comparison."""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .kernels import bilinear_resize, convolve_separable, gaussian_kernel1d
from .spectral import ImageF, _dct_matrix

# Standard luminance quantization table, row-major.
JPEG_LUMA_TABLE = np.array(
    [
        [16, 11, 10, 16, 24, 40, 51, 61],
        [12, 12, 14, 19, 26, 58, 60, 55],
        [14, 13, 16, 24, 40, 57, 69, 56],
        [14, 17, 22, 29, 51, 87, 80, 62],
        [18, 22, 37, 56, 68, 109, 103, 77],
        [24, 35, 55, 64, 81, 104, 113, 92],
        [49, 64, 78, 87, 103, 121, 120, 101],
        [72, 92, 95, 98, 112, 100, 103, 99],
    ],
    dtype=np.float64,
)


def crop_resize(image: ImageF, keep_fraction: float) -> ImageF:
    """Center-crop to a fraction of each side, then bilinear-resize back."""
    if not 0.0 < keep_fraction <= 1.0:
        raise ValidationError(f"keep_fraction must be in (0, 1], got {keep_fraction}")
    height, width = image.height, image.width
    crop_h = max(1, int(keep_fraction * height))
    crop_w = max(1, int(keep_fraction * width))
    top = (height - crop_h) // 2
    left = (width - crop_w) // 2
    cropped = image.samples[:, top : top + crop_h, left : left + crop_w]
    return ImageF(bilinear_resize(cropped, height, width))


def add_noise(image: ImageF, sigma: float, seed) -> ImageF:
    """Add i.i.d. Gaussian noise per sample, clamped to [0, 255]."""
    if sigma < 0 or not np.isfinite(sigma):
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, image.samples.shape) if sigma > 0 else 0.0
    return ImageF(np.clip(image.samples + noise, 0.0, 255.0))


def blur(image: ImageF, sigma: float) -> ImageF:
    """Separable Gaussian blur, kernel radius ceil(3*sigma), mirrored edges."""
    if sigma < 0 or not np.isfinite(sigma):
        raise ValidationError(f"sigma must be >= 0, got {sigma}")
    if sigma < 1e-6:
        return ImageF(image.samples.copy())
    kernel = gaussian_kernel1d(sigma)
    return ImageF(np.clip(convolve_separable(image.samples, kernel), 0.0, 255.0))


def quant_table(quality: int) -> np.ndarray:
    """Luminance table scaled by the libjpeg quality formula; all ones at 100."""
    if quality != int(quality) or not 1 <= quality <= 100:
        raise ValidationError(f"quality must be an integer in [1, 100], got {quality}")
    quality = int(quality)
    scale = 5000.0 / quality if quality < 50 else 200.0 - 2.0 * quality
    table = np.floor((JPEG_LUMA_TABLE * scale + 50.0) / 100.0)
    return np.clip(table, 1.0, 255.0)


def jpeg_compress(image: ImageF, quality: int) -> ImageF:
    """Quantization-only JPEG simulation: 8x8 block DCT per channel.

    RGB is treated as three luminance planes with no chroma subsampling;
    the pixels a detector sees are what matters, not bit-stream fidelity.
    """
    table = quant_table(quality)
    planes = image.samples
    channels, height, width = planes.shape
    pad_h = (-height) % 8
    pad_w = (-width) % 8
    if pad_h or pad_w:
        planes = np.pad(planes, ((0, 0), (0, pad_h), (0, pad_w)), mode="symmetric")
    shifted = planes - 128.0
    nh, nw = shifted.shape[1] // 8, shifted.shape[2] // 8
    blocks = shifted.reshape(channels, nh, 8, nw, 8).transpose(0, 1, 3, 2, 4)
    basis = _dct_matrix(8)
    coeffs = basis @ blocks @ basis.T
    coeffs = np.round(coeffs / table) * table
    restored = basis.T @ coeffs @ basis + 128.0
    out = restored.transpose(0, 1, 3, 2, 4).reshape(channels, nh * 8, nw * 8)
    out = out[:, :height, :width]
    return ImageF(np.clip(out, 0.0, 255.0))
