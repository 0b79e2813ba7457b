"""Evaluation protocol, cross-removal experiment, reporting, and run configs.

A run splits each class into three pairwise-disjoint subsets: hold-out
(fingerprint estimation), fit (detector fitting), and eval (measurement).
Each attack is calibrated to the target PSNR on a small calibration subset
of the eval fakes, applied to the full eval split, and scored against every
configured detector. The whole pipeline is a pure function of the config.
"""

from __future__ import annotations

import dataclasses
import datetime
import json
import math
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._version import __version__
from .attacks import apply_attack, calibrate_attack, calibrate_strength
from .detectors import (
    CosineModel,
    RidgeModel,
    cosine_predict_batch,
    fit_cosine_model,
    ridge_fit,
    ridge_predict_batch,
)
from .errors import CalibrationError, ValidationError
from .features import sum_transformed
from .fingerprint import (
    Fingerprint,
    LassoConfig,
    estimate_mean_fingerprint,
    estimate_peak_fingerprint,
    grid_search_peak_threshold,
    train_lasso,
)
from .imageio import DatasetHandle, sample_dataset, save_png
from .metrics import FAKE, NATURAL, accuracy, mean_psnr, psnr, success_rate
from .parallel import pmap
from .perturb import add_noise, blur, crop_resize, jpeg_compress
from .spectral import EPS_DEFAULT, ImageF, clip_view, dct2_raw, log_abs
from .synth import ArtifactSpec, SynthConfig, gen_fake, gen_natural

__all__ = [
    "CrossReport",
    "ReportCell",
    "RunConfig",
    "RunReport",
    "accuracy",
    "cross_removal",
    "emit_report",
    "emit_spectrum_heatmap",
    "load_report",
    "mean_psnr",
    "psnr",
    "run_evaluation",
    "success_rate",
]

_DETECTOR_KINDS = ("ridge", "cosine")
_ATTACK_KINDS = ("none", "bars", "mean", "peaks", "regression", "crop", "noise", "blur", "jpeg")
_CSV_COLUMNS = ("dataset", "detector", "model", "accuracy", "attack", "success_rate", "psnr", "params")


@dataclass(frozen=True)
class RunConfig:
    """Resolved evaluation settings; see README for the config file keys."""

    data: str = "synth"
    dataset_name: str = "synthetic"
    model_name: str = "synthA"
    fake_dir: Path | None = None
    real_dir: Path | None = None
    width: int = 64
    height: int = 64
    channels: int = 1
    smoothness: float = 1.0
    artifact_mode: str = "additive_bins"
    bins: tuple[tuple[int, int, int, float], ...] = ()
    upsample_factor: int = 2
    upsample_kernel: str = "zero_insertion"
    detectors: tuple[str, ...] = ("ridge", "cosine")
    attacks: tuple[str, ...] = ("bars", "mean", "peaks", "regression")
    target_psnr: float = 30.0
    psnr_tol: float = 0.25
    holdout_count: int = 1000
    fit_count: int = 1000
    eval_count: int = 1000
    calib_count: int = 200
    seed: int = 0
    out_dir: Path | None = None
    eps: float = EPS_DEFAULT
    lasso_lambda: float = 0.003
    lasso_max_iterations: int = 200
    ridge_lambda: float = 1.0
    peak_thresholds: tuple[float, ...] = (0.3, 0.6, 0.9)
    cross_attack: str = "mean"
    emit_examples: int = 4

    def __post_init__(self):
        if self.data not in ("synth", "dirs"):
            raise ValidationError(f"data must be 'synth' or 'dirs', got {self.data!r}")
        if self.data == "dirs" and (self.fake_dir is None or self.real_dir is None):
            raise ValidationError("dirs mode requires fake_dir and real_dir")
        for count in (self.holdout_count, self.fit_count, self.eval_count, self.calib_count):
            if count < 1:
                raise ValidationError(f"counts must be >= 1, got {count}")
        if self.target_psnr <= 0:
            raise ValidationError(f"target_psnr must be > 0, got {self.target_psnr}")
        for det in self.detectors:
            if det not in _DETECTOR_KINDS:
                raise ValidationError(f"unknown detector {det!r}")
        for atk in self.attacks:
            if atk not in _ATTACK_KINDS:
                raise ValidationError(f"unknown attack {atk!r}")
        if self.cross_attack not in ("mean", "peaks"):
            raise ValidationError(f"cross_attack must be 'mean' or 'peaks', got {self.cross_attack!r}")

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        """Parse a flat key = value config file; keys mirror the field names."""
        values = _parse_flat_config(path)
        kwargs = {}
        for key, raw in values.items():
            if key.startswith("cross_bins") or key.startswith("cross_dir"):
                continue  # consumed by load_cross_populations
            if key not in _CONFIG_PARSERS:
                raise ValidationError(f"{path}: unknown config key {key!r}")
            kwargs[key] = _CONFIG_PARSERS[key](raw)
        return cls(**kwargs)

    def artifact_spec(self) -> ArtifactSpec:
        return ArtifactSpec(
            mode=self.artifact_mode,
            bins=self.bins,
            factor=self.upsample_factor,
            kernel=self.upsample_kernel,
        )

    def metadata(self) -> dict:
        meta = {}
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, Path):
                value = str(value)
            elif isinstance(value, tuple):
                value = list(value) if f.name != "bins" else [list(b) for b in value]
            meta[f.name] = value
        return meta


def _parse_flat_config(path) -> dict[str, str]:
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ValidationError(f"{path}:{lineno}: expected 'key = value', got {line!r}")
        key, raw = stripped.split("=", 1)
        values[key.strip()] = raw.strip()
    return values


def _parse_bins(raw: str) -> tuple[tuple[int, int, int, float], ...]:
    bins = []
    for part in raw.split(","):
        part = part.strip()
        if not part:
            continue
        fields = part.split(":")
        if len(fields) != 4:
            raise ValidationError(f"bins entries are channel:row:col:amplitude, got {part!r}")
        bins.append((int(fields[0]), int(fields[1]), int(fields[2]), float(fields[3])))
    return tuple(bins)


def _parse_list(raw: str) -> tuple[str, ...]:
    return tuple(item.strip() for item in raw.split(",") if item.strip())


def _parse_floats(raw: str) -> tuple[float, ...]:
    return tuple(float(item) for item in raw.split(",") if item.strip())


_CONFIG_PARSERS = {
    "data": str,
    "dataset_name": str,
    "model_name": str,
    "fake_dir": Path,
    "real_dir": Path,
    "width": int,
    "height": int,
    "channels": int,
    "smoothness": float,
    "artifact_mode": str,
    "bins": _parse_bins,
    "upsample_factor": int,
    "upsample_kernel": str,
    "detectors": _parse_list,
    "attacks": _parse_list,
    "target_psnr": float,
    "psnr_tol": float,
    "holdout_count": int,
    "fit_count": int,
    "eval_count": int,
    "calib_count": int,
    "seed": int,
    "out_dir": Path,
    "eps": float,
    "lasso_lambda": float,
    "lasso_max_iterations": int,
    "ridge_lambda": float,
    "peak_thresholds": _parse_floats,
    "cross_attack": str,
    "emit_examples": int,
}


@dataclass
class ReportCell:
    dataset: str
    detector: str
    model: str
    accuracy: float
    attack: str
    success_rate: float | None
    psnr_db: float | None
    params: str
    error: str | None = None


@dataclass
class RunReport:
    cells: list[ReportCell] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


@dataclass
class _Bundle:
    """Pairwise-disjoint image subsets for one fake population."""

    holdout_fakes: list
    holdout_reals: list
    fit_fakes: list
    fit_reals: list
    eval_fakes: list
    eval_reals: list


def _split_ranges(cfg: RunConfig):
    h, f, e = cfg.holdout_count, cfg.fit_count, cfg.eval_count
    ranges = [(0, h), (h, h + f), (h + f, h + f + e)]
    for (a1, b1), (a2, b2) in zip(ranges, ranges[1:]):
        if b1 > a2:
            raise AssertionError("split index ranges overlap")
    return ranges


def _natural_seed(seed: int) -> int:
    state = np.random.SeedSequence([seed, zlib.crc32(b"naturals")]).generate_state(1, dtype=np.uint64)
    return int(state[0])


def _population_seed(seed: int, artifact: ArtifactSpec) -> int:
    # Seed fake populations by their artifact description: the same artifact
    # under the same run seed is the same population, bit for bit.
    state = np.random.SeedSequence(
        [seed, zlib.crc32(repr(artifact).encode())]
    ).generate_state(1, dtype=np.uint64)
    return int(state[0])


def _synth_bundle(cfg: RunConfig, artifact: ArtifactSpec, real_seed: int, fake_seed: int) -> _Bundle:
    total = cfg.holdout_count + cfg.fit_count + cfg.eval_count
    naturals = gen_natural(
        SynthConfig(
            count=total,
            width=cfg.width,
            height=cfg.height,
            channels=cfg.channels,
            seed=real_seed,
            smoothness=cfg.smoothness,
        )
    )
    fakes = gen_fake(
        SynthConfig(
            count=total,
            width=cfg.width,
            height=cfg.height,
            channels=cfg.channels,
            seed=fake_seed,
            smoothness=cfg.smoothness,
        ),
        artifact,
    )
    (h0, h1), (f0, f1), (e0, e1) = _split_ranges(cfg)
    return _Bundle(
        holdout_fakes=fakes[h0:h1],
        holdout_reals=naturals[h0:h1],
        fit_fakes=fakes[f0:f1],
        fit_reals=naturals[f0:f1],
        eval_fakes=fakes[e0:e1],
        eval_reals=naturals[e0:e1],
    )


def _dirs_bundle(cfg: RunConfig, fake_dir: Path, real_dir: Path) -> _Bundle:
    fakes = DatasetHandle.from_dir(fake_dir, cfg.seed)
    reals = DatasetHandle.from_dir(real_dir, cfg.seed + 1)
    return _Bundle(
        holdout_fakes=sample_dataset(fakes, cfg.holdout_count, "holdout"),
        holdout_reals=sample_dataset(reals, cfg.holdout_count, "holdout"),
        fit_fakes=sample_dataset(fakes, cfg.fit_count, "fit"),
        fit_reals=sample_dataset(reals, cfg.fit_count, "fit"),
        eval_fakes=sample_dataset(fakes, cfg.eval_count, "eval"),
        eval_reals=sample_dataset(reals, cfg.eval_count, "eval"),
    )


def _prepare_bundle(cfg: RunConfig) -> _Bundle:
    if cfg.data == "dirs":
        return _dirs_bundle(cfg, cfg.fake_dir, cfg.real_dir)
    artifact = cfg.artifact_spec()
    return _synth_bundle(cfg, artifact, _natural_seed(cfg.seed), _population_seed(cfg.seed, artifact))


def _fit_detector(name: str, cfg: RunConfig, bundle: _Bundle):
    if name == "ridge":
        return ridge_fit(bundle.fit_fakes, bundle.fit_reals, cfg.ridge_lambda, eps=cfg.eps)
    return fit_cosine_model(bundle.fit_fakes, bundle.fit_reals)


def _predict_batch(model, images) -> list[str]:
    if isinstance(model, RidgeModel):
        return ridge_predict_batch(images, model)
    if isinstance(model, CosineModel):
        return cosine_predict_batch(images, model)
    raise ValidationError(f"unknown detector model type {type(model).__name__}")


def _detector_accuracy(model, bundle: _Bundle) -> float:
    preds = _predict_batch(model, bundle.eval_fakes + bundle.eval_reals)
    truths = [FAKE] * len(bundle.eval_fakes) + [NATURAL] * len(bundle.eval_reals)
    return accuracy(truths, preds)


def _noise_seed(seed: int, index: int):
    return [seed, 0x6E6F6973, index]


def _resolve_perturbation(name: str, cfg: RunConfig):
    """Map a perturbation to (apply(image, s, index), s_max, integer)."""
    width = cfg.width
    if name == "crop":
        # Integer strength = pixels removed per side pair; avoids the PSNR
        # staircase that defeats tolerance-based bisection.
        return (
            lambda im, s, i: crop_resize(im, (im.width - int(s)) / im.width),
            width - 1,
            True,
        )
    if name == "noise":
        return (
            lambda im, s, i: add_noise(im, s, _noise_seed(cfg.seed, i)),
            100.0,
            False,
        )
    if name == "blur":
        return (lambda im, s, i: blur(im, s), 20.0, False)
    if name == "jpeg":
        return (lambda im, s, i: jpeg_compress(im, 100 - int(s)), 99, True)
    raise ValidationError(f"unknown perturbation {name!r}")


def _perturbation_params(name: str, s: float, cfg: RunConfig) -> str:
    if name == "crop":
        return f"kind=crop;keep_fraction={(cfg.width - int(s)) / cfg.width:g}"
    if name == "noise":
        return f"kind=noise;sigma={s:g}"
    if name == "blur":
        return f"kind=blur;sigma={s:g}"
    return f"kind=jpeg;quality={100 - int(s)}"


def _estimate_fingerprint(kind: str, cfg: RunConfig, bundle: _Bundle) -> Fingerprint:
    if kind == "mean":
        return estimate_mean_fingerprint(bundle.holdout_fakes, bundle.holdout_reals, seed=cfg.seed)
    if kind == "peaks":
        return estimate_peak_fingerprint(
            bundle.holdout_fakes, bundle.holdout_reals, eps=cfg.eps, seed=cfg.seed
        )
    if kind == "regression":
        lasso_cfg = LassoConfig(lam=cfg.lasso_lambda, max_iterations=cfg.lasso_max_iterations)
        return train_lasso(
            bundle.holdout_fakes, bundle.holdout_reals, lasso_cfg, eps=cfg.eps, seed=cfg.seed
        )
    raise ValidationError(f"attack {kind!r} has no fingerprint")


def _run_one_attack(name: str, cfg: RunConfig, bundle: _Bundle):
    """Calibrate and apply one attack; returns (attacked, psnr, params)."""
    calib = bundle.eval_fakes[: min(cfg.calib_count, len(bundle.eval_fakes))]
    if name == "none":
        return bundle.eval_fakes, math.inf, "kind=none;s=0"
    if name in ("crop", "noise", "blur", "jpeg"):
        apply_fn, s_max, integer = _resolve_perturbation(name, cfg)
        s = calibrate_strength(
            apply_fn, calib, cfg.target_psnr, cfg.psnr_tol, s_max=s_max, integer=integer
        )
        attacked = pmap(lambda pair: apply_fn(pair[1], s, pair[0]), list(enumerate(bundle.eval_fakes)))
        achieved = mean_psnr(bundle.eval_fakes, attacked)
        return attacked, achieved, _perturbation_params(name, s, cfg)

    if name == "bars":
        spec = calibrate_attack("bars", calib, cfg.target_psnr, tol=cfg.psnr_tol)
    elif name == "peaks":
        threshold = grid_search_peak_threshold(
            bundle.holdout_fakes,
            bundle.holdout_reals,
            cfg.peak_thresholds,
            cfg.target_psnr,
            eps=cfg.eps,
            ridge_lambda=cfg.ridge_lambda,
            psnr_tol=cfg.psnr_tol,
            calib_count=cfg.calib_count,
        )
        fp = _estimate_fingerprint("peaks", cfg, bundle)
        spec = calibrate_attack(
            "peaks", calib, cfg.target_psnr, fingerprint=fp, threshold=threshold, tol=cfg.psnr_tol
        )
    else:
        fp = _estimate_fingerprint(name, cfg, bundle)
        spec = calibrate_attack(
            name, calib, cfg.target_psnr, fingerprint=fp, tol=cfg.psnr_tol
        )
    attacked = pmap(lambda im: apply_attack(im, spec), bundle.eval_fakes)
    achieved = mean_psnr(bundle.eval_fakes, attacked)
    return attacked, achieved, spec.params_text()


def _emit_examples(cfg: RunConfig, attack: str, originals, attacked):
    out_dir = Path(cfg.out_dir) / "examples"
    out_dir.mkdir(parents=True, exist_ok=True)
    for i in range(min(cfg.emit_examples, len(originals))):
        pair = np.concatenate(
            [np.clip(originals[i].samples, 0, 255), np.clip(attacked[i].samples, 0, 255)],
            axis=2,
        )
        save_png(ImageF(pair), out_dir / f"{attack}_{i:03d}.png")


def run_evaluation(cfg: RunConfig) -> RunReport:
    """Full protocol: split, estimate, fit, calibrate, attack, measure.

    Calibration failures are recorded per cell and do not abort the run.
    """
    bundle = _prepare_bundle(cfg)
    models = {name: _fit_detector(name, cfg, bundle) for name in cfg.detectors}
    accuracies = {name: _detector_accuracy(model, bundle) for name, model in models.items()}

    report = RunReport(metadata=_report_metadata(cfg))
    for attack in cfg.attacks:
        try:
            attacked, achieved, params = _run_one_attack(attack, cfg, bundle)
        except CalibrationError as exc:
            for det in cfg.detectors:
                report.cells.append(
                    ReportCell(
                        dataset=cfg.dataset_name,
                        detector=det,
                        model=cfg.model_name,
                        accuracy=accuracies[det],
                        attack=attack,
                        success_rate=None,
                        psnr_db=None,
                        params=f"error={exc}",
                        error=str(exc),
                    )
                )
            continue
        for det in cfg.detectors:
            preds = _predict_batch(models[det], attacked)
            report.cells.append(
                ReportCell(
                    dataset=cfg.dataset_name,
                    detector=det,
                    model=cfg.model_name,
                    accuracy=accuracies[det],
                    attack=attack,
                    success_rate=success_rate(preds),
                    psnr_db=achieved,
                    params=params,
                )
            )
        if cfg.out_dir is not None and attack != "none":
            _emit_examples(cfg, attack, bundle.eval_fakes, attacked)

    if cfg.out_dir is not None:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        emit_report(report, "json", out / "report.json")
        emit_report(report, "csv", out / "report.csv")
        emit_spectrum_heatmap(bundle.eval_fakes, out / "spectrum_fakes.png", eps=cfg.eps)
        emit_spectrum_heatmap(bundle.eval_reals, out / "spectrum_naturals.png", eps=cfg.eps)
    return report


@dataclass
class CrossReport:
    """Success-rate matrix: rows are attacked populations, columns the
    fingerprint sources used for removal.

    `uncalibrated` lists (population, fingerprint) cells where the removal
    could not spend the PSNR budget (typically a sparse fingerprint whose
    support the target population never occupies); those cells score the
    unmodified images.
    """

    names: list[str]
    matrix: np.ndarray
    uncalibrated: list[tuple[str, str]] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)


def cross_removal(cfg: RunConfig, populations) -> CrossReport:
    """Apply each population's fingerprint to every population's fakes.

    `populations` maps names to ArtifactSpec (synth mode) or to fake image
    directories (dirs mode). Naturals are shared across populations. Entry
    [i][j] is the success rate of removing fingerprint j from population
    i's fakes, judged by population i's own ridge detector.
    """
    populations = list(populations.items()) if isinstance(populations, dict) else list(populations)
    if not populations:
        raise ValidationError("cross_removal needs at least one population")

    bundles = []
    for name, source in populations:
        if isinstance(source, ArtifactSpec):
            bundles.append(
                _synth_bundle(cfg, source, _natural_seed(cfg.seed), _population_seed(cfg.seed, source))
            )
        else:
            bundles.append(_dirs_bundle(cfg, Path(source), cfg.real_dir))

    fingerprints = []
    for bundle in bundles:
        if cfg.cross_attack == "mean":
            fingerprints.append(
                estimate_mean_fingerprint(bundle.holdout_fakes, bundle.holdout_reals, seed=cfg.seed)
            )
        else:
            fingerprints.append(
                estimate_peak_fingerprint(
                    bundle.holdout_fakes, bundle.holdout_reals, eps=cfg.eps, seed=cfg.seed
                )
            )
    detectors_ = [
        ridge_fit(b.fit_fakes, b.fit_reals, cfg.ridge_lambda, eps=cfg.eps) for b in bundles
    ]
    thresholds = [None] * len(bundles)
    if cfg.cross_attack == "peaks":
        thresholds = [
            grid_search_peak_threshold(
                b.holdout_fakes,
                b.holdout_reals,
                cfg.peak_thresholds,
                cfg.target_psnr,
                eps=cfg.eps,
                ridge_lambda=cfg.ridge_lambda,
                psnr_tol=cfg.psnr_tol,
                calib_count=cfg.calib_count,
            )
            for b in bundles
        ]

    n = len(populations)
    matrix = np.zeros((n, n))
    uncalibrated = []
    for i, bundle in enumerate(bundles):
        calib = bundle.eval_fakes[: min(cfg.calib_count, len(bundle.eval_fakes))]
        for j, fp in enumerate(fingerprints):
            try:
                spec = calibrate_attack(
                    cfg.cross_attack,
                    calib,
                    cfg.target_psnr,
                    fingerprint=fp,
                    threshold=thresholds[j],
                    tol=cfg.psnr_tol,
                )
                attacked = pmap(lambda im: apply_attack(im, spec), bundle.eval_fakes)
            except CalibrationError:
                # Nothing to remove in this population; the attack is a no-op.
                uncalibrated.append((populations[i][0], populations[j][0]))
                attacked = bundle.eval_fakes
            preds = _predict_batch(detectors_[i], attacked)
            matrix[i, j] = success_rate(preds)
    return CrossReport(
        names=[name for name, _ in populations],
        matrix=matrix,
        uncalibrated=uncalibrated,
        metadata=_report_metadata(cfg),
    )


def _report_metadata(cfg: RunConfig) -> dict:
    return {
        "fpforge_version": __version__,
        "numpy_version": np.__version__,
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds"),
        "config": cfg.metadata(),
    }


def _format_rate(value) -> str:
    return "" if value is None else f"{value:.4f}"


def _format_psnr(value) -> str:
    if value is None:
        return ""
    if math.isinf(value):
        return "inf"
    return f"{value:.2f}"


def _cell_to_json(cell: ReportCell) -> dict:
    out = dataclasses.asdict(cell)
    if out["psnr_db"] is not None and math.isinf(out["psnr_db"]):
        out["psnr_db"] = "inf"
    return out


def _cell_from_json(data: dict) -> ReportCell:
    if data.get("psnr_db") == "inf":
        data = dict(data, psnr_db=math.inf)
    return ReportCell(**data)


def emit_report(report: RunReport, fmt: str, path) -> Path:
    """Write a report as CSV or JSON with a stable column/key order."""
    path = Path(path)
    if fmt == "csv":
        lines = [",".join(_CSV_COLUMNS)]
        for cell in report.cells:
            lines.append(
                ",".join(
                    (
                        cell.dataset,
                        cell.detector,
                        cell.model,
                        _format_rate(cell.accuracy),
                        cell.attack,
                        _format_rate(cell.success_rate),
                        _format_psnr(cell.psnr_db),
                        '"%s"' % cell.params.replace('"', "'"),
                    )
                )
            )
        path.write_text("\n".join(lines) + "\n")
        return path
    if fmt == "json":
        payload = {
            "metadata": report.metadata,
            "cells": [_cell_to_json(c) for c in report.cells],
        }
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        return path
    raise ValidationError(f"unknown report format {fmt!r}; use 'csv' or 'json'")


def load_report(path) -> RunReport:
    """Parse a JSON report back into a RunReport (for re-rendering)."""
    payload = json.loads(Path(path).read_text())
    return RunReport(
        cells=[_cell_from_json(c) for c in payload.get("cells", [])],
        metadata=payload.get("metadata", {}),
    )


def emit_spectrum_heatmap(images, out_path, eps: float = EPS_DEFAULT) -> ImageF:
    """Mean DCT spectrum, log-scaled, clipped to [-10, 10], as 8-bit grayscale."""
    if not images:
        raise ValidationError("heatmap needs at least one image")
    mean_spec = sum_transformed(images, dct2_raw) / len(images)
    plane = mean_spec.mean(axis=0)
    clipped = clip_view(log_abs(plane, eps), -10.0, 10.0)
    pixels = (clipped + 10.0) * (255.0 / 20.0)
    heatmap = ImageF(pixels[np.newaxis, :, :])
    save_png(heatmap, out_path)
    return heatmap
