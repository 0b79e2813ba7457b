"""Flattened log-DCT feature extraction shared by the linear models."""

from __future__ import annotations

import numpy as np

from .errors import ValidationError
from .parallel import pmap
from .spectral import dct2_raw, log_abs

_CHUNK = 64


def check_uniform_dims(images, name: str):
    if not images:
        raise ValidationError(f"{name} must be non-empty")
    shape = images[0].samples.shape
    for im in images:
        if im.samples.shape != shape:
            raise ValidationError(
                f"{name} must have uniform dimensions, got {shape} and {im.samples.shape}"
            )
    return shape


def sum_transformed(images, transform) -> np.ndarray:
    """Sum `transform(image planes)` over images, deterministically chunked."""
    chunks = [images[i : i + _CHUNK] for i in range(0, len(images), _CHUNK)]

    def chunk_sum(chunk):
        total = transform(chunk[0].samples)
        for im in chunk[1:]:
            total = total + transform(im.samples)
        return total

    partials = pmap(chunk_sum, chunks)
    total = partials[0]
    for part in partials[1:]:
        total = total + part
    return total


def log_dct_features(images, eps: float) -> np.ndarray:
    """(n, C*H*W) matrix of flattened log-scaled DCT coefficients."""
    check_uniform_dims(images, "images")
    rows = pmap(lambda im: log_abs(dct2_raw(im.samples), eps).ravel(), images)
    return np.stack(rows)


def standardize_columns(matrix: np.ndarray):
    """Per-column standardization; constant columns get unit scale."""
    mean = matrix.mean(axis=0)
    std = matrix.std(axis=0)
    std = np.where(std == 0.0, 1.0, std)
    return (matrix - mean) / std, mean, std
