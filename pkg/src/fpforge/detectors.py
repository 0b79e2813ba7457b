"""Reimplementations of two frequency-domain deep-fake detectors.

* Cosine detector: a fingerprint is the mean FFT magnitude spectrum of a
  set of generated images; an image counts as fake when the cosine
  similarity between its magnitude spectrum and the fingerprint reaches a
  calibrated threshold.
* Ridge detector: a binary ridge regression over standardized flattened
  log-DCT features with labels fake=+1, natural=-1; the sign of the score
  decides, exact zero counting as natural.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FileFormatError, TruncatedFileError, ValidationError
from .features import (
    check_uniform_dims,
    log_dct_features,
    standardize_columns,
    sum_transformed,
)
from .metrics import FAKE, NATURAL
from .parallel import pmap
from .spectral import EPS_DEFAULT, ImageF, MagnitudeSpectrum, fft_magnitude

_MAGIC = b"FPDM"
_VERSION = 1
_HEADER = struct.Struct("<4sHBBII")
_KIND_COSINE = 0
_KIND_RIDGE = 1


@dataclass(frozen=True)
class CosineModel:
    fingerprint: MagnitudeSpectrum
    threshold: float
    n_fit: int

    def __post_init__(self):
        if not np.isfinite(self.threshold):
            raise ValidationError("cosine threshold must be finite")


@dataclass(frozen=True)
class RidgeModel:
    weights: np.ndarray
    bias: float
    lam: float
    feature_mean: np.ndarray
    feature_std: np.ndarray
    channels: int
    height: int
    width: int
    eps: float

    def __post_init__(self):
        for name in ("weights", "feature_mean", "feature_std"):
            arr = np.asarray(getattr(self, name), dtype=np.float64)
            if not np.all(np.isfinite(arr)):
                raise ValidationError(f"ridge model {name} must be finite")
            object.__setattr__(self, name, arr)
        if self.feature_std.min() <= 0:
            raise ValidationError("feature std values must be > 0")


def cosine_fit(fakes) -> MagnitudeSpectrum:
    """Element-wise mean FFT magnitude spectrum over a set of images."""
    check_uniform_dims(fakes, "fakes")
    total = sum_transformed(fakes, lambda p: np.abs(np.fft.fft2(p, axes=(1, 2))))
    return MagnitudeSpectrum(total / len(fakes))


def _cosine_similarity(mag: np.ndarray, fingerprint: np.ndarray) -> float:
    a = mag.ravel()
    b = fingerprint.ravel()
    na = float(np.linalg.norm(a))
    nb = float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        raise ValidationError("cosine similarity undefined for a zero-norm spectrum")
    return float(a @ b) / (na * nb)


def cosine_score(image: ImageF, model: CosineModel) -> float:
    """Cosine similarity between the image's FFT magnitudes and the fingerprint."""
    if image.samples.shape != model.fingerprint.magnitudes.shape:
        raise ValidationError("image dimensions do not match the fingerprint")
    return _cosine_similarity(
        fft_magnitude(image).magnitudes, model.fingerprint.magnitudes
    )


def _scores_against(images, fingerprint: MagnitudeSpectrum) -> np.ndarray:
    return np.array(
        pmap(
            lambda im: _cosine_similarity(
                fft_magnitude(im).magnitudes, fingerprint.magnitudes
            ),
            images,
        )
    )


def _balanced_accuracy(real_scores, fake_scores, threshold: float) -> float:
    tpr = float(np.mean(fake_scores >= threshold))
    tnr = float(np.mean(real_scores < threshold))
    return (tpr + tnr) / 2.0


def cosine_calibrate(reals, fakes, fingerprint: MagnitudeSpectrum) -> float:
    """Threshold maximizing balanced accuracy for the rule score >= t => fake."""
    check_uniform_dims(reals, "reals")
    check_uniform_dims(fakes, "fakes")
    real_scores = _scores_against(reals, fingerprint)
    fake_scores = _scores_against(fakes, fingerprint)
    scores = np.sort(np.unique(np.concatenate([real_scores, fake_scores])))
    candidates = [scores[0] - 1.0]
    candidates.extend(((scores[:-1] + scores[1:]) / 2.0).tolist())
    candidates.append(scores[-1] + 1.0)
    best_t = candidates[0]
    best_ba = -1.0
    for t in candidates:
        ba = _balanced_accuracy(real_scores, fake_scores, t)
        if ba > best_ba:
            best_ba = ba
            best_t = t
    return float(best_t)


def fit_cosine_model(fakes, reals) -> CosineModel:
    """Fingerprint from the fakes plus a threshold calibrated on both classes."""
    fingerprint = cosine_fit(fakes)
    threshold = cosine_calibrate(reals, fakes, fingerprint)
    return CosineModel(fingerprint=fingerprint, threshold=threshold, n_fit=len(fakes))


def cosine_predict(image: ImageF, model: CosineModel):
    score = cosine_score(image, model)
    return (FAKE if score >= model.threshold else NATURAL), score


def cosine_predict_batch(images, model: CosineModel) -> list[str]:
    scores = _scores_against(images, model.fingerprint)
    return [FAKE if s >= model.threshold else NATURAL for s in scores]


def ridge_fit(fakes, reals, lam: float, eps: float = EPS_DEFAULT) -> RidgeModel:
    """Exact ridge solve of (X'X + lam*I) w = X'y on standardized features.

    When the feature dimension exceeds the sample count the equivalent dual
    system w = X'(XX' + lam*I)^-1 y is solved instead; both are the same
    linear system. Labels are fake=+1, natural=-1 and the bias is fit on
    centered data.
    """
    shape = check_uniform_dims(list(fakes) + list(reals), "training images")
    if not fakes or not reals:
        raise ValidationError("both classes must be non-empty")
    if lam < 0 or not np.isfinite(lam):
        raise ValidationError(f"lambda must be >= 0, got {lam}")
    X = log_dct_features(list(fakes) + list(reals), eps)
    y = np.concatenate([np.ones(len(fakes)), -np.ones(len(reals))])
    Xs, mean, std = standardize_columns(X)
    yc = y - y.mean()
    n, d = Xs.shape
    if lam == 0.0 and d > n:
        raise ValidationError(
            "ridge system is singular (more features than samples); use lambda > 0"
        )
    try:
        if d <= n:
            gram = Xs.T @ Xs
            gram[np.diag_indices_from(gram)] += lam
            w = np.linalg.solve(gram, Xs.T @ yc)
        else:
            gram = Xs @ Xs.T
            gram[np.diag_indices_from(gram)] += lam
            w = Xs.T @ np.linalg.solve(gram, yc)
    except np.linalg.LinAlgError as exc:
        raise ValidationError("ridge system is singular; use lambda > 0") from exc
    bias = float(y.mean() - Xs.mean(axis=0) @ w)
    channels, height, width = shape
    return RidgeModel(
        weights=w,
        bias=bias,
        lam=lam,
        feature_mean=mean,
        feature_std=std,
        channels=channels,
        height=height,
        width=width,
        eps=eps,
    )


def ridge_scores(images, model: RidgeModel) -> np.ndarray:
    X = log_dct_features(images, model.eps)
    Xs = (X - model.feature_mean) / model.feature_std
    return Xs @ model.weights + model.bias


def ridge_predict(image: ImageF, model: RidgeModel):
    """Label plus raw score; an exact-zero score counts as natural."""
    if image.samples.shape != (model.channels, model.height, model.width):
        raise ValidationError("image dimensions do not match the ridge model")
    score = float(ridge_scores([image], model)[0])
    return (FAKE if score > 0.0 else NATURAL), score


def ridge_predict_batch(images, model: RidgeModel) -> list[str]:
    scores = ridge_scores(images, model)
    return [FAKE if s > 0.0 else NATURAL for s in scores]


def save_model(model, path) -> None:
    """Serialize a detector model with FPDM framing, f64 LE payload."""
    if isinstance(model, CosineModel):
        mags = model.fingerprint.magnitudes
        channels, height, width = mags.shape
        header = _HEADER.pack(_MAGIC, _VERSION, _KIND_COSINE, channels, width, height)
        body = struct.pack("<Id", model.n_fit, model.threshold)
        payload = np.ascontiguousarray(mags, dtype="<f8").tobytes()
        Path(path).write_bytes(header + body + payload)
        return
    if isinstance(model, RidgeModel):
        header = _HEADER.pack(
            _MAGIC, _VERSION, _KIND_RIDGE, model.channels, model.width, model.height
        )
        body = struct.pack("<ddd", model.lam, model.bias, model.eps)
        payload = b"".join(
            np.ascontiguousarray(arr, dtype="<f8").tobytes()
            for arr in (model.weights, model.feature_mean, model.feature_std)
        )
        Path(path).write_bytes(header + body + payload)
        return
    raise ValidationError(f"cannot save model of type {type(model).__name__}")


def load_model(path):
    raw = Path(path).read_bytes()
    if len(raw) < _HEADER.size:
        if raw[: len(_MAGIC)] != _MAGIC[: len(raw)]:
            raise FileFormatError(f"{path}: bad magic, not a detector model file")
        raise TruncatedFileError(f"{path}: truncated header")
    magic, version, kind, channels, width, height = _HEADER.unpack_from(raw)
    if magic != _MAGIC:
        raise FileFormatError(f"{path}: bad magic {magic!r}, not a detector model file")
    if version != _VERSION:
        raise FileFormatError(f"{path}: unsupported version {version}")
    d = channels * width * height
    offset = _HEADER.size
    if kind == _KIND_COSINE:
        body = struct.Struct("<Id")
        expected = offset + body.size + d * 8
        if len(raw) < expected:
            raise TruncatedFileError(f"{path}: expected {expected} bytes, got {len(raw)}")
        if len(raw) > expected:
            raise FileFormatError(f"{path}: {len(raw) - expected} trailing bytes")
        n_fit, threshold = body.unpack_from(raw, offset)
        mags = np.frombuffer(raw, dtype="<f8", offset=offset + body.size).reshape(
            channels, height, width
        )
        return CosineModel(
            fingerprint=MagnitudeSpectrum(mags.copy()), threshold=threshold, n_fit=n_fit
        )
    if kind == _KIND_RIDGE:
        body = struct.Struct("<ddd")
        expected = offset + body.size + 3 * d * 8
        if len(raw) < expected:
            raise TruncatedFileError(f"{path}: expected {expected} bytes, got {len(raw)}")
        if len(raw) > expected:
            raise FileFormatError(f"{path}: {len(raw) - expected} trailing bytes")
        lam, bias, eps = body.unpack_from(raw, offset)
        flat = np.frombuffer(raw, dtype="<f8", offset=offset + body.size)
        return RidgeModel(
            weights=flat[:d].copy(),
            bias=bias,
            lam=lam,
            feature_mean=flat[d : 2 * d].copy(),
            feature_std=flat[2 * d :].copy(),
            channels=channels,
            height=height,
            width=width,
            eps=eps,
        )
    raise FileFormatError(f"{path}: unknown detector kind code {kind}")
