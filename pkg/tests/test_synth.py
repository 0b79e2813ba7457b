import numpy as np
import pytest

from fpforge.errors import ValidationError
from fpforge.spectral import dct2_raw
from fpforge.synth import ArtifactSpec, SynthConfig, dct_basis_image, gen_fake, gen_natural


def spectra_mean(images):
    total = np.zeros_like(dct2_raw(images[0].samples))
    for im in images:
        total += dct2_raw(im.samples)
    return total / len(images)


class TestGenNatural:
    def test_deterministic(self):
        cfg = SynthConfig(count=5, width=16, height=16, seed=42)
        a = gen_natural(cfg)
        b = gen_natural(cfg)
        for x, y in zip(a, b):
            assert np.array_equal(x.samples, y.samples)

    def test_sample_range(self):
        cfg = SynthConfig(count=20, width=16, height=16, seed=1)
        for im in gen_natural(cfg):
            assert im.samples.min() >= 16.0
            assert im.samples.max() <= 240.0

    def test_diagonal_spectral_decay(self):
        # Frozen sample: mean |DCT| falls monotonically along the diagonal.
        cfg = SynthConfig(count=200, width=32, height=32, seed=9, smoothness=1.0)
        acc = np.zeros((32, 32))
        for im in gen_natural(cfg):
            acc += np.abs(dct2_raw(im.samples)[0])
        diag = np.array([acc[i, i] for i in range(32)]) / 200
        assert np.all(np.diff(diag) < 0)

    def test_smoothness_cutoff_zeroes_high_bins(self):
        cfg = SynthConfig(count=3, width=32, height=32, seed=5, smoothness=0.3)
        max_radius = np.sqrt(31**2 + 31**2)
        for im in gen_natural(cfg):
            coeffs = dct2_raw(im.samples)[0]
            rows, cols = np.indices(coeffs.shape)
            dead = np.sqrt(rows**2 + cols**2) > 0.3 * max_radius
            assert np.abs(coeffs[dead]).max() < 1e-9

    def test_config_validation(self):
        with pytest.raises(ValidationError):
            SynthConfig(count=0, width=8, height=8)
        with pytest.raises(ValidationError):
            SynthConfig(count=1, width=8, height=8, smoothness=0.0)
        with pytest.raises(ValidationError):
            SynthConfig(count=1, width=8, height=8, channels=2)


class TestGenFakeBins:
    def test_zero_amplitude_is_bit_identical(self):
        cfg = SynthConfig(count=4, width=16, height=16, seed=3)
        spec = ArtifactSpec(mode="additive_bins", bins=((0, 5, 6, 0.0),))
        for nat, fake in zip(gen_natural(cfg), gen_fake(cfg, spec)):
            assert np.array_equal(nat.samples, fake.samples)

    def test_empty_bins_identical_to_natural(self):
        cfg = SynthConfig(count=4, width=16, height=16, seed=3)
        for mode in ("additive_bins", "multiplicative_bins"):
            spec = ArtifactSpec(mode=mode, bins=())
            for nat, fake in zip(gen_natural(cfg), gen_fake(cfg, spec)):
                assert np.array_equal(nat.samples, fake.samples)

    def test_additive_shifts_exactly_one_coefficient(self):
        cfg = SynthConfig(count=3, width=16, height=16, seed=8)
        spec = ArtifactSpec(mode="additive_bins", bins=((0, 4, 7, 123.0),))
        for nat, fake in zip(gen_natural(cfg), gen_fake(cfg, spec)):
            delta = dct2_raw(fake.samples)[0] - dct2_raw(nat.samples)[0]
            assert abs(delta[4, 7] - 123.0) < 1e-9
            delta[4, 7] = 0.0
            assert np.abs(delta).max() < 1e-9

    def test_multiplicative_scales_coefficient(self):
        cfg = SynthConfig(count=3, width=16, height=16, seed=8)
        spec = ArtifactSpec(mode="multiplicative_bins", bins=((0, 4, 7, 2.5),))
        for nat, fake in zip(gen_natural(cfg), gen_fake(cfg, spec)):
            before = dct2_raw(nat.samples)[0, 4, 7]
            after = dct2_raw(fake.samples)[0, 4, 7]
            assert abs(after - 2.5 * before) < 1e-9

    def test_population_mean_difference_recovers_bump(self):
        # Disjoint fake/real seeds, n=500: the mean-spectrum difference shows
        # the injected amplitude at the bin and stays below 5% elsewhere.
        b = 2000.0
        fakes = gen_fake(
            SynthConfig(count=500, width=32, height=32, seed=105),
            ArtifactSpec(mode="additive_bins", bins=((0, 8, 9, b),)),
        )
        reals = gen_natural(SynthConfig(count=500, width=32, height=32, seed=106))
        diff = (spectra_mean(fakes) - spectra_mean(reals))[0]
        assert abs(diff[8, 9] - b) < 0.05 * b
        diff[8, 9] = 0.0
        assert np.abs(diff).max() < 0.05 * b

    def test_bin_bounds_validated(self):
        cfg = SynthConfig(count=1, width=8, height=8, seed=0)
        spec = ArtifactSpec(mode="additive_bins", bins=((0, 8, 0, 1.0),))
        with pytest.raises(ValidationError):
            gen_fake(cfg, spec)
        spec = ArtifactSpec(mode="additive_bins", bins=((1, 0, 0, 1.0),))
        with pytest.raises(ValidationError):
            gen_fake(cfg, spec)


class TestGenFakeUpsample:
    def test_zero_insertion_has_strong_spectral_replicas(self):
        # Energy in the top-half vertical-frequency band vs bilinear
        # up-sampling of the same low-resolution content.
        cfg = SynthConfig(count=20, width=64, height=64, seed=3, smoothness=1.0)
        zero_ins = gen_fake(cfg, ArtifactSpec(mode="upsample", factor=2, kernel="zero_insertion"))
        bilinear = gen_fake(cfg, ArtifactSpec(mode="upsample", factor=2, kernel="bilinear"))

        def band_energy(images):
            total = 0.0
            for im in images:
                mag = np.abs(np.fft.fft2(im.samples, axes=(1, 2)))
                total += float((mag[:, 16:48, :] ** 2).sum())
            return total

        assert band_energy(zero_ins) >= 5.0 * band_energy(bilinear)

    def test_output_size_and_range(self):
        cfg = SynthConfig(count=2, width=32, height=32, seed=4)
        for kernel in ("nearest", "bilinear", "zero_insertion"):
            for im in gen_fake(cfg, ArtifactSpec(mode="upsample", factor=2, kernel=kernel)):
                assert im.samples.shape == (1, 32, 32)
                assert im.samples.min() >= 0.0 and im.samples.max() <= 255.0

    def test_nearest_repeats_pixels(self):
        cfg = SynthConfig(count=1, width=8, height=8, seed=4)
        content = gen_natural(SynthConfig(count=1, width=4, height=4, seed=4))[0]
        up = gen_fake(cfg, ArtifactSpec(mode="upsample", factor=2, kernel="nearest"))[0]
        assert np.array_equal(up.samples[0, ::2, ::2], content.samples[0])
        assert np.array_equal(up.samples[0, 1::2, 1::2], content.samples[0])

    def test_factor_must_divide_size(self):
        cfg = SynthConfig(count=1, width=9, height=9, seed=0)
        with pytest.raises(ValidationError):
            gen_fake(cfg, ArtifactSpec(mode="upsample", factor=2))

    def test_spec_validation(self):
        with pytest.raises(ValidationError):
            ArtifactSpec(mode="bogus")
        with pytest.raises(ValidationError):
            ArtifactSpec(mode="upsample", factor=3)
        with pytest.raises(ValidationError):
            ArtifactSpec(mode="upsample", kernel="lanczos")
        with pytest.raises(ValidationError):
            ArtifactSpec(mode="additive_bins", bins=((0, 1, 1, np.inf),))


class TestBasisImage:
    def test_basis_is_unit_coefficient(self):
        basis = dct_basis_image(16, 16, 3, 5)
        coeffs = dct2_raw(basis[np.newaxis])
        assert abs(coeffs[0, 3, 5] - 1.0) < 1e-12
        coeffs[0, 3, 5] = 0.0
        assert np.abs(coeffs).max() < 1e-12
