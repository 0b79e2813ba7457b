"""Small spatial-domain kernels shared by the perturbation and synthesis code."""

from __future__ import annotations

import math

import numpy as np


def gaussian_kernel1d(sigma: float) -> np.ndarray:
    """Normalized Gaussian taps with radius ceil(3*sigma)."""
    radius = int(math.ceil(3.0 * sigma))
    offsets = np.arange(-radius, radius + 1, dtype=np.float64)
    kernel = np.exp(-(offsets**2) / (2.0 * sigma * sigma))
    return kernel / kernel.sum()


def convolve_separable(planes: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Convolve each (C, H, W) channel with kernel along rows then columns.

    Edges are handled by mirror (symmetric) padding, which preserves the
    total mass of the image for a normalized kernel.
    """
    radius = len(kernel) // 2
    out = planes
    for axis in (1, 2):
        pad = [(0, 0), (0, 0), (0, 0)]
        pad[axis] = (radius, radius)
        padded = np.pad(out, pad, mode="symmetric")
        acc = np.zeros_like(out)
        for offset, weight in enumerate(kernel):
            sl = [slice(None)] * 3
            sl[axis] = slice(offset, offset + out.shape[axis])
            acc += weight * padded[tuple(sl)]
        out = acc
    return out


def convolve2d_same(planes: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """Dense 2-D convolution per channel with symmetric padding."""
    kh, kw = kernel.shape
    rh, rw = kh // 2, kw // 2
    padded = np.pad(planes, ((0, 0), (rh, rh), (rw, rw)), mode="symmetric")
    _, height, width = planes.shape
    acc = np.zeros_like(planes)
    for i in range(kh):
        for j in range(kw):
            acc += kernel[i, j] * padded[:, i : i + height, j : j + width]
    return acc


def bilinear_resize(planes: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Align-corners bilinear resize of a (C, H, W) array."""
    _, height, width = planes.shape
    if (out_h, out_w) == (height, width):
        return planes.copy()

    def _coords(n_out, n_in):
        if n_out == 1 or n_in == 1:
            return np.zeros(n_out, dtype=np.float64)
        return np.arange(n_out, dtype=np.float64) * ((n_in - 1) / (n_out - 1))

    ys = _coords(out_h, height)
    xs = _coords(out_w, width)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, height - 1)
    x1 = np.minimum(x0 + 1, width - 1)
    wy = (ys - y0)[np.newaxis, :, np.newaxis]
    wx = (xs - x0)[np.newaxis, np.newaxis, :]

    top = planes[:, y0, :][:, :, x0] * (1.0 - wx) + planes[:, y0, :][:, :, x1] * wx
    bottom = planes[:, y1, :][:, :, x0] * (1.0 - wx) + planes[:, y1, :][:, :, x1] * wx
    return top * (1.0 - wy) + bottom * wy
