"""Fingerprint-removal attacks and PSNR-targeted strength calibration.

All attacks operate on float samples, clamp to [0, 255], and leave 8-bit
quantization to save/PSNR time, which is what a defender would observe.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CalibrationError, ValidationError
from .fingerprint import Fingerprint, process_peak_fingerprint
from .metrics import psnr
from .parallel import pmap
from .spectral import ImageF, dct2_raw, idct2_raw

_KINDS = ("bars", "mean", "peaks", "regression")

# Default bisection ranges; widened once (x10) before giving up.
_DEFAULT_S_MAX = {"mean": 1e4, "regression": 1e3, "peaks": 1e2}


@dataclass(frozen=True)
class AttackSpec:
    """Attack kind plus its parameters, serializable for reproducible runs.

    For the peaks kind, `fingerprint` is the raw peak fingerprint; the
    scale/threshold/intensify/clip processing happens at application time
    with (threshold, strength).
    """

    kind: str
    strength: float
    threshold: float | None = None
    fingerprint: Fingerprint | None = None

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise ValidationError(f"unknown attack kind {self.kind!r}")
        if self.strength < 0 or not np.isfinite(self.strength):
            raise ValidationError(f"strength must be >= 0, got {self.strength}")
        if self.kind == "bars":
            if self.strength != int(self.strength):
                raise ValidationError("bars width must be an integer")
            if self.fingerprint is not None or self.threshold is not None:
                raise ValidationError("bars attacks take no fingerprint or threshold")
            return
        if self.fingerprint is None:
            raise ValidationError(f"{self.kind} attacks require a fingerprint")
        if self.kind == "peaks":
            if self.fingerprint.kind != "peak" or self.fingerprint.processed:
                raise ValidationError("peaks attack specs expect a raw peak fingerprint")
            if self.threshold is None or not 0.0 <= self.threshold <= 1.0:
                raise ValidationError(f"peaks threshold must be in [0, 1], got {self.threshold}")
            return
        if self.threshold is not None:
            raise ValidationError(f"{self.kind} attacks take no threshold")
        if self.fingerprint.kind != self.kind:
            raise ValidationError(
                f"{self.kind} attack requires a {self.kind} fingerprint, "
                f"got kind {self.fingerprint.kind!r}"
            )

    def params_text(self) -> str:
        parts = [f"kind={self.kind}", f"s={self.strength:g}"]
        if self.threshold is not None:
            parts.append(f"t={self.threshold:g}")
        return ";".join(parts)


def _check_fingerprint_dims(image: ImageF, fp: Fingerprint):
    if image.samples.shape != fp.values.shape:
        raise ValidationError(
            f"fingerprint dimensions {fp.values.shape} do not match "
            f"image {image.samples.shape}"
        )


def _finish(planes: np.ndarray) -> ImageF:
    return ImageF(np.clip(planes, 0.0, 255.0))


def attack_bars(image: ImageF, s: int) -> ImageF:
    """Zero DCT coefficient bars of width s along the bottom and right edges."""
    if s != int(s):
        raise ValidationError(f"bars width must be an integer, got {s}")
    s = int(s)
    height, width = image.height, image.width
    if not 0 <= s <= min(width, height):
        raise ValidationError(
            f"bars width must be in [0, {min(width, height)}], got {s}"
        )
    coeffs = dct2_raw(image.samples)
    if s > 0:
        coeffs[:, height - s :, :] = 0.0
        coeffs[:, :, width - s :] = 0.0
    return _finish(idct2_raw(coeffs))


def attack_mean(image: ImageF, fp: Fingerprint, s: float) -> ImageF:
    """Subtract s times the mean fingerprint from the image's spectrum."""
    if fp.kind != "mean":
        raise ValidationError(f"expected a mean fingerprint, got kind {fp.kind!r}")
    if s < 0 or not np.isfinite(s):
        raise ValidationError(f"strength must be >= 0, got {s}")
    _check_fingerprint_dims(image, fp)
    return _finish(idct2_raw(dct2_raw(image.samples) - s * fp.values))


def attack_peaks(image: ImageF, fp_processed: Fingerprint) -> ImageF:
    """Multiply the spectrum by (1 - F) for a processed peak fingerprint F."""
    if fp_processed.kind != "peak" or not fp_processed.processed:
        raise ValidationError("peaks attack requires a processed peak fingerprint")
    if fp_processed.values.min() < 0 or fp_processed.values.max() > 1:
        raise ValidationError("processed peak fingerprint values must lie in [0, 1]")
    _check_fingerprint_dims(image, fp_processed)
    coeffs = dct2_raw(image.samples) * (1.0 - fp_processed.values)
    return _finish(idct2_raw(coeffs))


def attack_regression(image: ImageF, fp: Fingerprint, s: float) -> ImageF:
    """Multiply the spectrum by (1 - clip(s*F, -1, 1)) for regression weights F.

    Entries with negative weights amplify coefficients by up to a factor of 2.
    """
    if fp.kind != "regression":
        raise ValidationError(f"expected a regression fingerprint, got kind {fp.kind!r}")
    if s < 0 or not np.isfinite(s):
        raise ValidationError(f"strength must be >= 0, got {s}")
    _check_fingerprint_dims(image, fp)
    factor = 1.0 - np.clip(s * fp.values, -1.0, 1.0)
    return _finish(idct2_raw(dct2_raw(image.samples) * factor))


def apply_attack(image: ImageF, spec: AttackSpec) -> ImageF:
    if spec.kind == "bars":
        return attack_bars(image, int(spec.strength))
    if spec.kind == "mean":
        return attack_mean(image, spec.fingerprint, spec.strength)
    if spec.kind == "peaks":
        processed = process_peak_fingerprint(spec.fingerprint, spec.threshold, spec.strength)
        return attack_peaks(image, processed)
    return attack_regression(image, spec.fingerprint, spec.strength)


def _mean_psnr_at(apply_fn, images, s) -> float:
    values = pmap(lambda pair: psnr(pair[1], apply_fn(pair[1], s, pair[0])), list(enumerate(images)))
    if any(math.isinf(v) for v in values):
        return math.inf
    return float(np.mean(values))


def calibrate_strength(
    apply_fn,
    images,
    target_psnr: float,
    tol: float = 0.25,
    *,
    s_max: float,
    integer: bool = False,
    max_iterations: int = 60,
) -> float:
    """Find the strength whose mean PSNR over `images` meets `target_psnr`.

    `apply_fn(image, strength, index)` must produce the modified image; the
    index allows per-image seeding. Continuous strengths are bisected until
    the mean PSNR is within `tol` dB of the target. Integer strengths (bar
    widths, crop pixels, quality steps) return the largest value whose mean
    PSNR is still >= target, i.e. the closest approach from above.

    Raises CalibrationError when the target is unreachable; the error
    carries the achieved PSNR range.
    """
    images = list(images)
    if not images:
        raise ValidationError("calibration needs at least one image")
    if target_psnr <= 0 or not np.isfinite(target_psnr):
        raise ValidationError(f"target PSNR must be positive and finite, got {target_psnr}")
    if tol <= 0:
        raise ValidationError(f"tolerance must be > 0, got {tol}")

    if integer:
        hi = int(s_max)
        if hi < 1:
            raise ValidationError(f"integer strength range is empty (s_max={s_max})")
        p_lo = _mean_psnr_at(apply_fn, images, 1)
        if p_lo < target_psnr:
            raise CalibrationError(
                f"target {target_psnr} dB unreachable: even s=1 yields {p_lo:.2f} dB",
                achieved=(p_lo, math.inf),
            )
        if _mean_psnr_at(apply_fn, images, hi) >= target_psnr:
            return hi
        lo = 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if _mean_psnr_at(apply_fn, images, mid) >= target_psnr:
                lo = mid
            else:
                hi = mid
        return lo

    hi = float(s_max)
    p_hi = _mean_psnr_at(apply_fn, images, hi)
    if p_hi > target_psnr:
        hi *= 10.0
        p_hi = _mean_psnr_at(apply_fn, images, hi)
        if p_hi > target_psnr:
            raise CalibrationError(
                f"target {target_psnr} dB unreachable: PSNR stays in "
                f"[{p_hi:.2f}, inf] dB for strengths up to {hi:g}",
                achieved=(p_hi, math.inf),
            )
    lo = 0.0
    best_s = hi
    best_gap = abs(p_hi - target_psnr)
    for _ in range(max_iterations):
        mid = (lo + hi) / 2.0
        p_mid = _mean_psnr_at(apply_fn, images, mid)
        gap = abs(p_mid - target_psnr)
        if gap <= tol:
            return mid
        if gap < best_gap:
            best_gap = gap
            best_s = mid
        if p_mid > target_psnr:
            lo = mid
        else:
            hi = mid
    raise CalibrationError(
        f"calibration did not reach {target_psnr} +/- {tol} dB in "
        f"{max_iterations} iterations; best was {best_gap:.3f} dB off at s={best_s:g}",
        achieved=(target_psnr - best_gap, target_psnr + best_gap),
    )


def calibrate_attack(
    kind: str,
    images,
    target_psnr: float,
    *,
    fingerprint: Fingerprint | None = None,
    threshold: float | None = None,
    tol: float = 0.25,
    s_max: float | None = None,
) -> AttackSpec:
    """Calibrate an attack of the given kind and return its full spec."""
    images = list(images)
    if not images:
        raise ValidationError("calibration needs at least one image")
    if kind == "bars":
        limit = min(images[0].width, images[0].height) if s_max is None else int(s_max)
        s = calibrate_strength(
            lambda im, s, i: attack_bars(im, int(s)),
            images,
            target_psnr,
            tol,
            s_max=limit,
            integer=True,
        )
        return AttackSpec(kind="bars", strength=float(s))
    if kind == "mean":
        apply_fn = lambda im, s, i: attack_mean(im, fingerprint, s)
    elif kind == "peaks":
        apply_fn = lambda im, s, i: attack_peaks(
            im, process_peak_fingerprint(fingerprint, threshold, s)
        )
    elif kind == "regression":
        apply_fn = lambda im, s, i: attack_regression(im, fingerprint, s)
    else:
        raise ValidationError(f"unknown attack kind {kind!r}")
    s = calibrate_strength(
        apply_fn, images, target_psnr, tol, s_max=s_max or _DEFAULT_S_MAX[kind]
    )
    return AttackSpec(kind=kind, strength=s, threshold=threshold, fingerprint=fingerprint)


def psnr_monotonicity_violations(apply_fn, image: ImageF, strengths) -> list[tuple[float, float]]:
    """Strength pairs (s1 < s2) where PSNR increased instead of decreasing.

    Useful as an empirical harness; the regression attack can legitimately
    violate monotonicity because negative weights amplify coefficients.
    """
    strengths = sorted(strengths)
    values = [psnr(image, apply_fn(image, s, 0)) for s in strengths]
    violations = []
    for (s1, p1), (s2, p2) in zip(zip(strengths, values), zip(strengths[1:], values[1:])):
        if p1 < p2:
            violations.append((s1, s2))
    return violations
