"""Lossless PNG ingestion/emission and deterministic dataset sampling."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import FileFormatError, UnsupportedPngError, ValidationError
from .spectral import ImageF

_PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
_SUPPORTED_COLOR_TYPES = {0: "grayscale", 2: "rgb"}

# Named splits carve the seeded shuffle into three contiguous index blocks.
_SPLIT_BLOCKS = {"holdout": 0, "fit": 1, "eval": 2}


def _read_ihdr(path: Path):
    with open(path, "rb") as fh:
        head = fh.read(33)
    if len(head) < 16 or head[:8] != _PNG_SIGNATURE:
        raise FileFormatError(f"{path}: not a PNG file")
    _, tag = struct.unpack(">I4s", head[8:16])
    if tag != b"IHDR" or len(head) < 26:
        raise FileFormatError(f"{path}: missing IHDR chunk")
    width, height, bit_depth, color_type = struct.unpack(">IIBB", head[16:26])
    return width, height, bit_depth, color_type


def load_png(path) -> ImageF:
    """Load an 8-bit grayscale or RGB PNG into [0, 255] float samples."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image file: {path}")
    _, _, bit_depth, color_type = _read_ihdr(path)
    if bit_depth != 8:
        raise UnsupportedPngError(
            f"{path}: only 8-bit PNGs are supported, got bit depth {bit_depth}"
        )
    if color_type not in _SUPPORTED_COLOR_TYPES:
        raise UnsupportedPngError(
            f"{path}: only grayscale (0) and RGB (2) PNGs are supported, "
            f"got color type {color_type}"
        )
    with Image.open(path) as im:
        arr = np.asarray(im, dtype=np.uint8)
    return ImageF.from_hwc(arr.astype(np.float64))


def save_png(image: ImageF, path) -> None:
    """Write an 8-bit PNG, rounding samples half-up to the nearest integer."""
    samples = image.samples
    lo = float(samples.min())
    hi = float(samples.max())
    if lo < -0.5 or hi >= 255.5:
        raise ValidationError(
            f"samples out of storable range [-0.5, 255.5): found [{lo}, {hi}]"
        )
    quantized = np.floor(samples + 0.5).astype(np.uint8)
    hwc = np.moveaxis(quantized, 0, 2)
    if image.channels == 1:
        pil = Image.fromarray(hwc[:, :, 0], mode="L")
    else:
        pil = Image.fromarray(hwc, mode="RGB")
    pil.save(Path(path), format="PNG")


@dataclass(frozen=True)
class DatasetHandle:
    """A sorted directory of PNGs plus the seed that fixes its shuffle."""

    root: Path
    file_list: tuple[Path, ...]
    seed: int

    def __post_init__(self):
        if list(self.file_list) != sorted(self.file_list, key=str):
            raise ValidationError("file_list must be sorted lexicographically")

    @classmethod
    def from_dir(cls, root, seed: int) -> "DatasetHandle":
        root = Path(root)
        if not root.is_dir():
            raise FileNotFoundError(f"no such dataset directory: {root}")
        files = tuple(sorted(root.rglob("*.png"), key=str))
        return cls(root=root, file_list=files, seed=seed)

    def __len__(self) -> int:
        return len(self.file_list)


def split_indices(handle: DatasetHandle, split: str = "all") -> list[int]:
    """Shuffled file indices for a split; holdout/fit/eval are disjoint thirds."""
    order = np.random.default_rng(handle.seed).permutation(len(handle.file_list))
    if split == "all":
        return order.tolist()
    if split not in _SPLIT_BLOCKS:
        raise ValidationError(
            f"unknown split {split!r}; expected one of 'all', "
            + ", ".join(repr(s) for s in _SPLIT_BLOCKS)
        )
    third = len(handle.file_list) // 3
    block = _SPLIT_BLOCKS[split]
    start = block * third
    stop = start + third if block < 2 else len(handle.file_list)
    return order[start:stop].tolist()


def sample_dataset(handle: DatasetHandle, n: int, split: str = "all") -> list[ImageF]:
    """Load the first `n` images of a split's shuffled index order."""
    if n < 0:
        raise ValidationError(f"sample count must be >= 0, got {n}")
    indices = split_indices(handle, split)
    if n > len(indices):
        raise ValidationError(
            f"requested {n} images but split {split!r} holds only {len(indices)}"
        )
    return [load_png(handle.file_list[i]) for i in indices[:n]]
