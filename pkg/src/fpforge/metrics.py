"""Image quality and classification metrics."""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .spectral import ImageF

FAKE = "fake"
NATURAL = "natural"


def quantize_u8(samples: np.ndarray) -> np.ndarray:
    """Clamp to [0, 255] and round half-up to 8-bit values."""
    return np.floor(np.clip(samples, 0.0, 255.0) + 0.5).astype(np.uint8)


def psnr(a: ImageF, b: ImageF) -> float:
    """Peak signal-to-noise ratio over 8-bit quantized samples, in dB.

    Identical images return math.inf.
    """
    if a.samples.shape != b.samples.shape:
        raise ValidationError(
            f"psnr requires equal dimensions, got {a.samples.shape} vs {b.samples.shape}"
        )
    qa = quantize_u8(a.samples).astype(np.float64)
    qb = quantize_u8(b.samples).astype(np.float64)
    mse = float(np.mean((qa - qb) ** 2))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0**2 / mse)


def mean_psnr(originals, modified) -> float:
    """Mean PSNR over image pairs; infinite as soon as any pair is identical."""
    if len(originals) != len(modified):
        raise ValidationError("image lists must have equal length")
    values = [psnr(a, b) for a, b in zip(originals, modified)]
    if any(math.isinf(v) for v in values):
        return math.inf
    return float(np.mean(values))


def success_rate(predictions) -> float:
    """Fraction of predictions that are 'natural'."""
    predictions = list(predictions)
    if not predictions:
        raise ValidationError("success_rate needs at least one prediction")
    for p in predictions:
        if p not in (FAKE, NATURAL):
            raise ValidationError(f"unknown prediction label {p!r}")
    return sum(1 for p in predictions if p == NATURAL) / len(predictions)


def accuracy(truths, predictions) -> float:
    """Fraction of predictions equal to the true labels."""
    truths = list(truths)
    predictions = list(predictions)
    if not truths or len(truths) != len(predictions):
        raise ValidationError("accuracy needs equally sized, non-empty label lists")
    return sum(1 for t, p in zip(truths, predictions) if t == p) / len(truths)
