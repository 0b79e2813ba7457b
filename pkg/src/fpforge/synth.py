"""Desk-scale dataset synthesis with controllable up-sampling-style artifacts.

"Natural" images are spectrally shaped noise: white noise in the DCT domain
multiplied by a 1/(1+f)^2 radial envelope, low-passed at a cutoff fraction,
then affinely mapped to [16, 240]. "Fake" images add ground-truth artifacts:
either hand-placed coefficient bins or a genuine resolution-doubling step
whose spectral support is not hand-placed.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .kernels import bilinear_resize, convolve2d_same
from .spectral import ImageF, idct2_raw

_MODES = ("additive_bins", "multiplicative_bins", "upsample")
_KERNELS = ("nearest", "bilinear", "zero_insertion")


@dataclass(frozen=True)
class SynthConfig:
    count: int
    width: int
    height: int
    channels: int = 1
    seed: int = 0
    smoothness: float = 1.0  # low-pass cutoff as a fraction of the max radius

    def __post_init__(self):
        if self.count < 1:
            raise ValidationError(f"count must be >= 1, got {self.count}")
        if self.width < 1 or self.height < 1:
            raise ValidationError("width and height must be >= 1")
        if self.channels not in (1, 3):
            raise ValidationError(f"channels must be 1 or 3, got {self.channels}")
        if not 0.0 < self.smoothness <= 1.0:
            raise ValidationError(f"smoothness must be in (0, 1], got {self.smoothness}")


@dataclass(frozen=True)
class ArtifactSpec:
    """Ground-truth artifact description for synthetic fakes.

    For the bin modes, `bins` lists (channel, row, col, amplitude) entries:
    amplitude is added to the DCT coefficient (additive_bins) or multiplies
    it (multiplicative_bins). For upsample mode, low-resolution content is
    enlarged by `factor` with the chosen kernel; zero_insertion mimics
    transposed-convolution up-sampling and gives the strongest artifacts.
    """

    mode: str
    bins: tuple[tuple[int, int, int, float], ...] = ()
    factor: int = 2
    kernel: str = "zero_insertion"

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ValidationError(f"unknown artifact mode {self.mode!r}")
        object.__setattr__(self, "bins", tuple(tuple(b) for b in self.bins))
        for entry in self.bins:
            if len(entry) != 4:
                raise ValidationError(f"bin entries are (channel, row, col, amplitude), got {entry}")
            if not np.isfinite(entry[3]):
                raise ValidationError(f"bin amplitude must be finite, got {entry[3]}")
        if self.mode == "upsample":
            if self.factor not in (2, 4):
                raise ValidationError(f"upsample factor must be 2 or 4, got {self.factor}")
            if self.kernel not in _KERNELS:
                raise ValidationError(f"unknown upsample kernel {self.kernel!r}")


@lru_cache(maxsize=None)
def _spectral_shape(height: int, width: int, cutoff: float) -> np.ndarray:
    rows = np.arange(height, dtype=np.float64)[:, np.newaxis]
    cols = np.arange(width, dtype=np.float64)[np.newaxis, :]
    radius = np.sqrt(rows**2 + cols**2)
    envelope = 1.0 / (1.0 + radius) ** 2
    max_radius = float(np.sqrt((height - 1) ** 2 + (width - 1) ** 2))
    if max_radius > 0:
        envelope[radius > cutoff * max_radius] = 0.0
    envelope.setflags(write=False)
    return envelope


@lru_cache(maxsize=None)
def dct_basis_image(height: int, width: int, row: int, col: int) -> np.ndarray:
    """Spatial image of a single unit DCT coefficient at (row, col)."""
    if not (0 <= row < height and 0 <= col < width):
        raise ValidationError(f"bin ({row}, {col}) outside {height}x{width} spectrum")
    spectrum = np.zeros((1, height, width))
    spectrum[0, row, col] = 1.0
    basis = idct2_raw(spectrum)[0]
    basis.setflags(write=False)
    return basis


def _natural_planes(cfg: SynthConfig, index: int) -> np.ndarray:
    rng = np.random.default_rng([cfg.seed, index])
    noise = rng.standard_normal((cfg.channels, cfg.height, cfg.width))
    coeffs = noise * _spectral_shape(cfg.height, cfg.width, cfg.smoothness)
    planes = idct2_raw(coeffs)
    lo = planes.min()
    hi = planes.max()
    if hi > lo:
        # Clip away the one-ulp overshoot the affine map can produce.
        return np.clip(16.0 + (planes - lo) * (224.0 / (hi - lo)), 16.0, 240.0)
    return np.full_like(planes, 128.0)


def gen_natural(cfg: SynthConfig) -> list[ImageF]:
    """Deterministic list of synthetic natural images for (seed, index)."""
    return [ImageF(_natural_planes(cfg, i)) for i in range(cfg.count)]


def _check_bins(spec: ArtifactSpec, cfg: SynthConfig):
    for channel, row, col, _ in spec.bins:
        if not 0 <= channel < cfg.channels:
            raise ValidationError(f"bin channel {channel} outside 0..{cfg.channels - 1}")
        if not (0 <= row < cfg.height and 0 <= col < cfg.width):
            raise ValidationError(f"bin ({row}, {col}) outside {cfg.height}x{cfg.width}")


def _inject_bins(planes: np.ndarray, spec: ArtifactSpec) -> np.ndarray:
    # Injection runs in the spatial domain via exact DCT basis images, so a
    # zero/unit amplitude leaves the pixels bit-identical to the natural base.
    out = planes.copy()
    _, height, width = planes.shape
    for channel, row, col, amplitude in spec.bins:
        basis = dct_basis_image(height, width, row, col)
        if spec.mode == "additive_bins":
            out[channel] += amplitude * basis
        else:
            coeff = float(np.sum(planes[channel] * basis))
            out[channel] += (amplitude - 1.0) * coeff * basis
    return out


def _upsample(planes: np.ndarray, factor: int, kernel: str) -> np.ndarray:
    channels, height, width = planes.shape
    if kernel == "nearest":
        return np.repeat(np.repeat(planes, factor, axis=1), factor, axis=2)
    if kernel == "bilinear":
        return bilinear_resize(planes, height * factor, width * factor)
    # zero_insertion: transposed-convolution style. Zero-fill with a gain of
    # factor^2 to preserve total mass, then smooth with a 3x3 box whose size
    # is not divisible by the stride -- the classic checkerboard source.
    up = np.zeros((channels, height * factor, width * factor))
    up[:, ::factor, ::factor] = planes * float(factor * factor)
    box = np.full((3, 3), 1.0 / 9.0)
    return convolve2d_same(up, box)


def gen_fake(cfg: SynthConfig, spec: ArtifactSpec) -> list[ImageF]:
    """Synthetic fakes carrying the artifact described by `spec`.

    Bin modes inject into natural images generated from `cfg` itself.
    Upsample mode generates content at size/factor and enlarges it, clamped
    to [0, 255].
    """
    if spec.mode in ("additive_bins", "multiplicative_bins"):
        _check_bins(spec, cfg)
        return [ImageF(_inject_bins(_natural_planes(cfg, i), spec)) for i in range(cfg.count)]

    if cfg.height % spec.factor or cfg.width % spec.factor:
        raise ValidationError(
            f"upsample factor {spec.factor} must divide {cfg.height}x{cfg.width}"
        )
    content_cfg = SynthConfig(
        count=cfg.count,
        width=cfg.width // spec.factor,
        height=cfg.height // spec.factor,
        channels=cfg.channels,
        seed=cfg.seed,
        smoothness=cfg.smoothness,
    )
    images = []
    for i in range(cfg.count):
        up = _upsample(_natural_planes(content_cfg, i), spec.factor, spec.kernel)
        images.append(ImageF(np.clip(up, 0.0, 255.0)))
    return images
