"""Exception types shared across the toolkit."""


class ValidationError(ValueError):
    """Invalid argument or broken invariant on an in-memory object."""


class FileFormatError(ValueError):
    """A file on disk does not match the expected framing."""


class TruncatedFileError(FileFormatError):
    """A file ended before its declared payload was complete."""


class UnsupportedPngError(FileFormatError):
    """A PNG with a bit depth or color type outside the supported set."""


class CalibrationError(RuntimeError):
    """A PSNR target could not be reached within the search range.

    `achieved` holds the (low, high) PSNR range that was reachable, when known.
    """

    def __init__(self, message, achieved=None):
        super().__init__(message)
        self.achieved = achieved
