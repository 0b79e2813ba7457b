"""fpforge: estimate, remove, and evaluate GAN frequency fingerprints."""

from ._version import __version__
from .errors import (
    CalibrationError,
    FileFormatError,
    TruncatedFileError,
    UnsupportedPngError,
    ValidationError,
)
from .spectral import (
    EPS_DEFAULT,
    ImageF,
    MagnitudeSpectrum,
    Spectrum,
    clip_view,
    dct2,
    fft_magnitude,
    idct2,
    log_scale,
)

__all__ = [
    "__version__",
    "CalibrationError",
    "FileFormatError",
    "TruncatedFileError",
    "UnsupportedPngError",
    "ValidationError",
    "EPS_DEFAULT",
    "ImageF",
    "MagnitudeSpectrum",
    "Spectrum",
    "clip_view",
    "dct2",
    "fft_magnitude",
    "idct2",
    "log_scale",
]
