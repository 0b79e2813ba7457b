import numpy as np
import pytest

from fpforge.detectors import (
    CosineModel,
    RidgeModel,
    cosine_calibrate,
    cosine_fit,
    cosine_predict,
    cosine_score,
    fit_cosine_model,
    load_model,
    ridge_fit,
    ridge_predict,
    ridge_predict_batch,
    save_model,
)
from fpforge.errors import FileFormatError, TruncatedFileError, ValidationError
from fpforge.features import log_dct_features
from fpforge.metrics import FAKE, NATURAL
from fpforge.spectral import ImageF, fft_magnitude
from fpforge.synth import ArtifactSpec, SynthConfig, gen_fake, gen_natural

from conftest import random_image


def cosine_image(n, k, amp=80.0, offset=128.0, axis=1):
    grid = np.arange(n)
    wave = amp * np.cos(2 * np.pi * k * grid / n) + offset
    plane = np.tile(wave, (n, 1)) if axis == 1 else np.tile(wave[:, None], (1, n))
    return ImageF(plane[np.newaxis])


@pytest.fixture(scope="module")
def upsample_split():
    art = ArtifactSpec(mode="upsample", factor=2, kernel="zero_insertion")
    fit_fakes = gen_fake(SynthConfig(count=100, width=32, height=32, seed=81), art)
    fit_reals = gen_natural(SynthConfig(count=100, width=32, height=32, seed=82))
    test_fakes = gen_fake(SynthConfig(count=60, width=32, height=32, seed=83), art)
    test_reals = gen_natural(SynthConfig(count=60, width=32, height=32, seed=84))
    return fit_fakes, fit_reals, test_fakes, test_reals


class TestCosineFit:
    def test_single_image_is_its_own_spectrum(self, rng):
        image = random_image(rng, height=8, width=8)
        fp = cosine_fit([image])
        assert np.allclose(fp.magnitudes, fft_magnitude(image).magnitudes)

    def test_duplicates_equal_single(self, rng):
        image = random_image(rng, height=8, width=8)
        one = cosine_fit([image])
        two = cosine_fit([image, image])
        assert np.allclose(one.magnitudes, two.magnitudes)

    def test_matches_naive_loop(self, rng):
        imgs = [random_image(rng, height=8, width=8) for _ in range(7)]
        fp = cosine_fit(imgs)
        naive = sum(fft_magnitude(im).magnitudes for im in imgs) / 7
        assert np.abs(fp.magnitudes - naive).max() < 1e-9


class TestCosineScore:
    def test_own_fingerprint_scores_one(self, rng):
        image = random_image(rng, height=8, width=8)
        model = CosineModel(fingerprint=cosine_fit([image]), threshold=0.5, n_fit=1)
        assert abs(cosine_score(image, model) - 1.0) < 1e-12

    def test_contrast_scaling_invariance(self, rng):
        image = random_image(rng, height=8, width=8, lo=10, hi=100)
        model = CosineModel(
            fingerprint=cosine_fit([random_image(rng, height=8, width=8)]),
            threshold=0.5,
            n_fit=1,
        )
        base = cosine_score(image, model)
        scaled = cosine_score(ImageF(2.5 * image.samples), model)
        assert abs(base - scaled) < 1e-12

    def test_disjoint_spectra_score_zero(self):
        a = cosine_image(16, 3, offset=0.0)
        b = cosine_image(16, 5, offset=0.0)
        model = CosineModel(fingerprint=cosine_fit([a]), threshold=0.5, n_fit=1)
        assert abs(cosine_score(b, model)) < 1e-9

    def test_zero_norm_rejected(self):
        zero = ImageF(np.zeros((1, 8, 8)))
        model = CosineModel(
            fingerprint=cosine_fit([cosine_image(8, 2)]), threshold=0.5, n_fit=1
        )
        with pytest.raises(ValidationError):
            cosine_score(zero, model)


class TestCosineCalibrate:
    def test_separated_distributions_reach_perfect_accuracy(self, upsample_split):
        fit_fakes, fit_reals, _, _ = upsample_split
        model = fit_cosine_model(fit_fakes, fit_reals)
        preds_f = [cosine_predict(im, model)[0] for im in fit_fakes[:30]]
        preds_r = [cosine_predict(im, model)[0] for im in fit_reals[:30]]
        assert all(p == FAKE for p in preds_f)
        assert all(p == NATURAL for p in preds_r)

    def test_identical_distributions_stay_near_half(self, rng):
        imgs = [random_image(rng, height=8, width=8) for _ in range(40)]
        fingerprint = cosine_fit(imgs)
        threshold = cosine_calibrate(imgs, imgs, fingerprint)
        scores = np.array(
            [cosine_score(im, CosineModel(fingerprint, 0.0, 1)) for im in imgs]
        )
        tpr = np.mean(scores >= threshold)
        tnr = np.mean(scores < threshold)
        assert abs((tpr + tnr) / 2 - 0.5) < 1e-9

    def test_threshold_matches_exhaustive_midpoint_sweep(self, rng):
        # Independent oracle: naive sweep over all midpoints.
        reals = [random_image(rng, height=8, width=8) for _ in range(25)]
        fakes = [
            ImageF(random_image(rng, height=8, width=8).samples * 0.5 + 60.0)
            for _ in range(25)
        ]
        fingerprint = cosine_fit(fakes)
        returned = cosine_calibrate(reals, fakes, fingerprint)
        model = CosineModel(fingerprint, 0.0, 1)
        rs = np.array([cosine_score(im, model) for im in reals])
        fs = np.array([cosine_score(im, model) for im in fakes])

        def balanced(th):
            return (np.mean(fs >= th) + np.mean(rs < th)) / 2

        scores = np.sort(np.unique(np.concatenate([rs, fs])))
        candidates = (
            [scores[0] - 1.0]
            + ((scores[:-1] + scores[1:]) / 2).tolist()
            + [scores[-1] + 1.0]
        )
        best = max(balanced(t) for t in candidates)
        assert abs(balanced(returned) - best) < 1e-12


class TestRidgeFit:
    def test_huge_lambda_shrinks_to_label_mean(self, rng):
        fakes = [random_image(rng, height=8, width=8) for _ in range(6)]
        reals = [random_image(rng, height=8, width=8) for _ in range(3)]
        model = ridge_fit(fakes, reals, 1e14)
        assert np.abs(model.weights).max() < 1e-6
        label_mean = (6 - 3) / 9
        assert abs(model.bias - label_mean) < 1e-6

    def test_single_feature_closed_form(self):
        # 1x1 images make the feature space one-dimensional.
        rng = np.random.default_rng(8)
        pixels = rng.uniform(10, 200, 10)
        fakes = [ImageF(np.full((1, 1, 1), p)) for p in pixels[:5]]
        reals = [ImageF(np.full((1, 1, 1), p)) for p in pixels[5:]]
        lam = 2.0
        model = ridge_fit(fakes, reals, lam, eps=1e-12)
        X = log_dct_features(fakes + reals, 1e-12)
        xs = ((X - X.mean(0)) / X.std(0)).ravel()
        y = np.array([1.0] * 5 + [-1.0] * 5)
        yc = y - y.mean()
        expected = float(xs @ yc) / (float(xs @ xs) + lam)
        assert abs(model.weights[0] - expected) < 1e-9

    def test_solves_normal_equations_in_both_regimes(self, rng):
        for n_side, size in ((8, 8), (3, 2)):  # d < n and d > n
            fakes = [random_image(rng, height=size, width=size) for _ in range(n_side)]
            reals = [random_image(rng, height=size, width=size) for _ in range(n_side)]
            lam = 0.7
            model = ridge_fit(fakes, reals, lam)
            X = log_dct_features(fakes + reals, model.eps)
            Xs = (X - model.feature_mean) / model.feature_std
            y = np.array([1.0] * n_side + [-1.0] * n_side)
            yc = y - y.mean()
            residual = Xs.T @ Xs @ model.weights + lam * model.weights - Xs.T @ yc
            assert np.abs(residual).max() < 1e-8

    def test_separable_training_accuracy(self, upsample_split):
        fit_fakes, fit_reals, _, _ = upsample_split
        model = ridge_fit(fit_fakes, fit_reals, 1.0)
        preds = ridge_predict_batch(fit_fakes + fit_reals, model)
        truth = [FAKE] * len(fit_fakes) + [NATURAL] * len(fit_reals)
        acc = sum(p == t for p, t in zip(preds, truth)) / len(truth)
        assert acc >= 0.99

    def test_first_order_optimality(self, rng):
        fakes = [random_image(rng, height=4, width=4) for _ in range(10)]
        reals = [random_image(rng, height=4, width=4) for _ in range(10)]
        lam = 1.0
        model = ridge_fit(fakes, reals, lam)
        X = log_dct_features(fakes + reals, model.eps)
        Xs = (X - model.feature_mean) / model.feature_std
        y = np.array([1.0] * 10 + [-1.0] * 10)
        yc = y - y.mean()

        def objective(w):
            r = yc - Xs @ w
            return float(r @ r) + lam * float(w @ w)

        base = objective(model.weights)
        rng2 = np.random.default_rng(0)
        for _ in range(5):
            delta = rng2.normal(0, 1e-3, model.weights.shape)
            assert objective(model.weights + delta) >= base - 1e-9

    def test_zero_lambda_singular_advises(self, rng):
        fakes = [random_image(rng, height=8, width=8) for _ in range(3)]
        reals = [random_image(rng, height=8, width=8) for _ in range(3)]
        with pytest.raises(ValidationError, match="lambda > 0"):
            ridge_fit(fakes, reals, 0.0)  # d > n is always singular

    def test_negative_lambda_rejected(self, rng):
        imgs = [random_image(rng, height=4, width=4) for _ in range(3)]
        with pytest.raises(ValidationError):
            ridge_fit(imgs, imgs, -1.0)


class TestRidgePredict:
    def test_zero_score_is_natural(self, rng):
        image = random_image(rng, height=4, width=4)
        model = RidgeModel(
            weights=np.zeros(16),
            bias=0.0,
            lam=1.0,
            feature_mean=np.zeros(16),
            feature_std=np.ones(16),
            channels=1,
            height=4,
            width=4,
            eps=1e-12,
        )
        label, score = ridge_predict(image, model)
        assert score == 0.0 and label == NATURAL

    def test_training_images_get_own_labels(self, upsample_split):
        fit_fakes, fit_reals, _, _ = upsample_split
        model = ridge_fit(fit_fakes[:40], fit_reals[:40], 1.0)
        assert all(ridge_predict(im, model)[0] == FAKE for im in fit_fakes[:10])
        assert all(ridge_predict(im, model)[0] == NATURAL for im in fit_reals[:10])

    def test_standardization_round_trip_preserves_scores(self, rng):
        fakes = [random_image(rng, height=4, width=4) for _ in range(8)]
        reals = [random_image(rng, height=4, width=4) for _ in range(8)]
        model = ridge_fit(fakes, reals, 0.5)
        raw_w = model.weights / model.feature_std
        raw_b = model.bias - float((model.feature_mean / model.feature_std) @ model.weights)
        for im in fakes[:3] + reals[:3]:
            _, score = ridge_predict(im, model)
            raw_feat = log_dct_features([im], model.eps)[0]
            unstandardized = float(raw_feat @ raw_w) + raw_b
            assert abs(score - unstandardized) < 1e-9

    def test_dimension_mismatch_rejected(self, rng, upsample_split):
        fit_fakes, fit_reals, _, _ = upsample_split
        model = ridge_fit(fit_fakes[:10], fit_reals[:10], 1.0)
        with pytest.raises(ValidationError):
            ridge_predict(random_image(rng, height=8, width=8), model)


class TestDetectorSanity:
    def test_ridge_on_upsample_artifacts(self, upsample_split):
        fit_fakes, fit_reals, test_fakes, test_reals = upsample_split
        model = ridge_fit(fit_fakes, fit_reals, 1.0)
        preds = ridge_predict_batch(test_fakes + test_reals, model)
        truth = [FAKE] * len(test_fakes) + [NATURAL] * len(test_reals)
        acc = sum(p == t for p, t in zip(preds, truth)) / len(truth)
        assert acc >= 0.95


class TestPersistence:
    def test_cosine_round_trip(self, tmp_path, rng):
        model = fit_cosine_model(
            [random_image(rng, height=8, width=8) for _ in range(4)],
            [random_image(rng, height=8, width=8) for _ in range(4)],
        )
        path = tmp_path / "model.bin"
        save_model(model, path)
        loaded = load_model(path)
        assert isinstance(loaded, CosineModel)
        assert loaded.threshold == model.threshold
        assert loaded.n_fit == model.n_fit
        assert np.array_equal(loaded.fingerprint.magnitudes, model.fingerprint.magnitudes)

    def test_ridge_round_trip(self, tmp_path, rng):
        fakes = [random_image(rng, height=4, width=4) for _ in range(6)]
        reals = [random_image(rng, height=4, width=4) for _ in range(6)]
        model = ridge_fit(fakes, reals, 1.5, eps=1e-9)
        path = tmp_path / "model.bin"
        save_model(model, path)
        loaded = load_model(path)
        assert isinstance(loaded, RidgeModel)
        assert (loaded.lam, loaded.bias, loaded.eps) == (model.lam, model.bias, model.eps)
        assert np.array_equal(loaded.weights, model.weights)
        assert np.array_equal(loaded.feature_mean, model.feature_mean)
        assert np.array_equal(loaded.feature_std, model.feature_std)
        _, s1 = ridge_predict(fakes[0], model)
        _, s2 = ridge_predict(fakes[0], loaded)
        assert s1 == s2

    def test_bad_magic_and_truncation(self, tmp_path, rng):
        model = fit_cosine_model(
            [random_image(rng, height=4, width=4) for _ in range(2)],
            [random_image(rng, height=4, width=4) for _ in range(2)],
        )
        path = tmp_path / "model.bin"
        save_model(model, path)
        data = path.read_bytes()
        path.write_bytes(b"XXXX" + data[4:])
        with pytest.raises(FileFormatError):
            load_model(path)
        path.write_bytes(data[:-8])
        with pytest.raises(TruncatedFileError):
            load_model(path)
