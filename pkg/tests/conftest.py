import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fpforge.spectral import ImageF

settings.register_profile(
    "default",
    max_examples=25,
    deadline=None,
    derandomize=True,  # the suite should be reproducibly green
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def random_image(rng, channels=1, height=16, width=16, lo=0.0, hi=255.0) -> ImageF:
    return ImageF(rng.uniform(lo, hi, (channels, height, width)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
