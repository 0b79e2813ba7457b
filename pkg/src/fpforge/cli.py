"""Command-line surface.

Exit codes: 0 success, 1 validation/format error, 2 I/O error,
3 calibration failure. FPFORGE_THREADS caps worker threads.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from ._version import __version__
from .attacks import AttackSpec, apply_attack
from .detectors import fit_cosine_model, ridge_fit, save_model
from .errors import CalibrationError, FileFormatError, ValidationError
from .evalcli import (
    RunConfig,
    cross_removal,
    emit_report,
    emit_spectrum_heatmap,
    load_report,
    run_evaluation,
    _parse_bins,
    _parse_flat_config,
)
from .fingerprint import (
    LassoConfig,
    estimate_mean_fingerprint,
    estimate_peak_fingerprint,
    load_fingerprint,
    save_fingerprint,
    train_lasso,
)
from .imageio import DatasetHandle, load_png, save_png
from .perturb import add_noise, blur, crop_resize, jpeg_compress
from .spectral import EPS_DEFAULT, ImageF
from .synth import ArtifactSpec, SynthConfig, gen_fake, gen_natural


def _load_dir(path, count=None):
    handle = DatasetHandle.from_dir(path, seed=0)
    files = handle.file_list if count is None else handle.file_list[:count]
    if not files:
        raise ValidationError(f"no PNG files under {path}")
    return [load_png(p) for p in files]


def _cmd_synth_gen(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cfg = SynthConfig(
        count=args.count,
        width=args.width,
        height=args.height,
        channels=args.channels,
        seed=args.seed,
        smoothness=args.smoothness,
    )
    if args.artifact is None:
        images = gen_natural(cfg)
    else:
        spec = ArtifactSpec(
            mode=args.artifact,
            bins=_parse_bins(args.bins) if args.bins else (),
            factor=args.factor,
            kernel=args.kernel,
        )
        images = gen_fake(cfg, spec)
    for i, image in enumerate(images):
        # Injected artifacts can leave the nominal range; PNG storage cannot.
        clamped = ImageF(np.clip(image.samples, 0.0, 255.0))
        save_png(clamped, out / f"{args.prefix}{i:05d}.png")
    print(f"wrote {len(images)} images to {out}")


def _cmd_fingerprint_estimate(args):
    fakes = _load_dir(args.fakes, args.count)
    reals = _load_dir(args.reals, args.count)
    if args.kind == "mean":
        fp = estimate_mean_fingerprint(fakes, reals, seed=args.seed)
    elif args.kind == "peak":
        fp = estimate_peak_fingerprint(fakes, reals, eps=args.eps, seed=args.seed)
    else:
        cfg = LassoConfig(lam=args.lasso_lambda, max_iterations=args.lasso_max_iterations)
        fp = train_lasso(fakes, reals, cfg, eps=args.eps, seed=args.seed)
        if not fp.converged:
            print("warning: lasso did not converge within max iterations", file=sys.stderr)
    save_fingerprint(fp, args.out)
    print(f"wrote {args.kind} fingerprint ({fp.channels}x{fp.height}x{fp.width}) to {args.out}")


def _cmd_attack_apply(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    fingerprint = load_fingerprint(args.fingerprint) if args.fingerprint else None
    spec = AttackSpec(
        kind=args.kind,
        strength=args.strength,
        threshold=args.threshold,
        fingerprint=fingerprint,
    )
    handle = DatasetHandle.from_dir(args.images, seed=0)
    files = handle.file_list if args.count is None else handle.file_list[: args.count]
    if not files:
        raise ValidationError(f"no PNG files under {args.images}")
    for path in files:
        attacked = apply_attack(load_png(path), spec)
        save_png(attacked, out / path.name)
    print(f"attacked {len(files)} images -> {out}")


def _cmd_detector_fit(args):
    fakes = _load_dir(args.fakes, args.count)
    reals = _load_dir(args.reals, args.count)
    if args.kind == "ridge":
        model = ridge_fit(fakes, reals, args.ridge_lambda, eps=args.eps)
    else:
        model = fit_cosine_model(fakes, reals)
    save_model(model, args.out)
    print(f"wrote {args.kind} model to {args.out}")


def _cmd_perturb_apply(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    handle = DatasetHandle.from_dir(args.images, seed=0)
    files = handle.file_list if args.count is None else handle.file_list[: args.count]
    if not files:
        raise ValidationError(f"no PNG files under {args.images}")
    for index, path in enumerate(files):
        image = load_png(path)
        if args.kind == "crop":
            result = crop_resize(image, args.strength)
        elif args.kind == "noise":
            result = add_noise(image, args.strength, [args.seed, index])
        elif args.kind == "blur":
            result = blur(image, args.strength)
        else:
            result = jpeg_compress(image, int(args.strength))
        save_png(result, out / path.name)
    print(f"perturbed {len(files)} images -> {out}")


def _cmd_eval_run(args):
    cfg = RunConfig.from_file(args.config)
    report = run_evaluation(cfg)
    for cell in report.cells:
        rate = "n/a" if cell.success_rate is None else f"{cell.success_rate:.4f}"
        print(f"{cell.detector:8s} {cell.attack:12s} success={rate} ({cell.params})")
    if cfg.out_dir is not None:
        print(f"report written under {cfg.out_dir}")


def load_cross_populations(path) -> dict[str, ArtifactSpec | Path]:
    """Read cross_bins_<name> / cross_dir_<name> keys from a config file."""
    populations: dict[str, ArtifactSpec | Path] = {}
    for key, raw in _parse_flat_config(path).items():
        if key.startswith("cross_bins_"):
            name = key[len("cross_bins_") :]
            populations[name] = ArtifactSpec(mode="additive_bins", bins=_parse_bins(raw))
        elif key.startswith("cross_dir_"):
            populations[key[len("cross_dir_") :]] = Path(raw)
    if not populations:
        raise ValidationError(f"{path}: no cross_bins_*/cross_dir_* population keys found")
    return populations


def _cmd_eval_cross(args):
    cfg = RunConfig.from_file(args.config)
    populations = load_cross_populations(args.config)
    result = cross_removal(cfg, populations)
    header = "population".ljust(14) + "".join(f"fp:{n}".rjust(12) for n in result.names)
    print(header)
    lines = [header]
    for i, name in enumerate(result.names):
        row = name.ljust(14) + "".join(f"{v:12.4f}" for v in result.matrix[i])
        print(row)
        lines.append(row)
    if cfg.out_dir is not None:
        out = Path(cfg.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        csv_lines = ["population," + ",".join(f"fp_{n}" for n in result.names)]
        for i, name in enumerate(result.names):
            csv_lines.append(name + "," + ",".join(f"{v:.4f}" for v in result.matrix[i]))
        (out / "cross_removal.csv").write_text("\n".join(csv_lines) + "\n")
        print(f"matrix written to {out / 'cross_removal.csv'}")


def _cmd_report_render(args):
    report = load_report(args.report)
    emit_report(report, args.format, args.out)
    print(f"rendered {args.format} report to {args.out}")


def _cmd_spectrum_heatmap(args):
    images = _load_dir(args.images, args.count)
    emit_spectrum_heatmap(images, args.out, eps=args.eps)
    print(f"wrote heatmap ({len(images)} images) to {args.out}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fpforge",
        description="Estimate, remove, and evaluate GAN frequency fingerprints.",
    )
    parser.add_argument("--version", action="version", version=f"fpforge {__version__}")
    top = parser.add_subparsers(dest="command", required=True)

    synth = top.add_parser("synth", help="synthetic dataset generation").add_subparsers(
        dest="subcommand", required=True
    )
    gen = synth.add_parser("gen", help="generate a PNG dataset")
    gen.add_argument("--out", required=True)
    gen.add_argument("--count", type=int, default=100)
    gen.add_argument("--width", type=int, default=64)
    gen.add_argument("--height", type=int, default=64)
    gen.add_argument("--channels", type=int, default=1)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--smoothness", type=float, default=1.0)
    gen.add_argument("--artifact", choices=["additive_bins", "multiplicative_bins", "upsample"])
    gen.add_argument("--bins", help="channel:row:col:amplitude, comma separated")
    gen.add_argument("--factor", type=int, default=2)
    gen.add_argument("--kernel", default="zero_insertion", choices=["nearest", "bilinear", "zero_insertion"])
    gen.add_argument("--prefix", default="img_")
    gen.set_defaults(func=_cmd_synth_gen)

    fingerprint = top.add_parser("fingerprint", help="fingerprint estimation").add_subparsers(
        dest="subcommand", required=True
    )
    estimate = fingerprint.add_parser("estimate", help="estimate a fingerprint from two directories")
    estimate.add_argument("--kind", required=True, choices=["mean", "peak", "lasso"])
    estimate.add_argument("--fakes", required=True)
    estimate.add_argument("--reals", required=True)
    estimate.add_argument("--out", required=True)
    estimate.add_argument("--count", type=int)
    estimate.add_argument("--eps", type=float, default=EPS_DEFAULT)
    estimate.add_argument("--seed", type=int, default=0)
    estimate.add_argument("--lasso-lambda", type=float, default=0.003)
    estimate.add_argument("--lasso-max-iterations", type=int, default=200)
    estimate.set_defaults(func=_cmd_fingerprint_estimate)

    attack = top.add_parser("attack", help="apply a removal attack").add_subparsers(
        dest="subcommand", required=True
    )
    apply_ = attack.add_parser("apply", help="attack every PNG in a directory")
    apply_.add_argument("--kind", required=True, choices=["bars", "mean", "peaks", "regression"])
    apply_.add_argument("--images", required=True)
    apply_.add_argument("--out", required=True)
    apply_.add_argument("--fingerprint", help="fingerprint file (all kinds except bars)")
    apply_.add_argument("--strength", type=float, required=True)
    apply_.add_argument("--threshold", type=float, help="peaks kind only, in [0, 1]")
    apply_.add_argument("--count", type=int)
    apply_.set_defaults(func=_cmd_attack_apply)

    detector = top.add_parser("detector", help="detector fitting").add_subparsers(
        dest="subcommand", required=True
    )
    fit = detector.add_parser("fit", help="fit a detector from two directories")
    fit.add_argument("--kind", required=True, choices=["cosine", "ridge"])
    fit.add_argument("--fakes", required=True)
    fit.add_argument("--reals", required=True)
    fit.add_argument("--out", required=True)
    fit.add_argument("--count", type=int)
    fit.add_argument("--ridge-lambda", type=float, default=1.0)
    fit.add_argument("--eps", type=float, default=EPS_DEFAULT)
    fit.set_defaults(func=_cmd_detector_fit)

    perturb = top.add_parser("perturb", help="baseline perturbations").add_subparsers(
        dest="subcommand", required=True
    )
    papply = perturb.add_parser("apply", help="perturb every PNG in a directory")
    papply.add_argument("--kind", required=True, choices=["crop", "noise", "blur", "jpeg"])
    papply.add_argument("--images", required=True)
    papply.add_argument("--out", required=True)
    papply.add_argument(
        "--strength",
        type=float,
        required=True,
        help="crop: keep fraction; noise/blur: sigma; jpeg: quality",
    )
    papply.add_argument("--seed", type=int, default=0)
    papply.add_argument("--count", type=int)
    papply.set_defaults(func=_cmd_perturb_apply)

    evalp = top.add_parser("eval", help="full evaluation runs").add_subparsers(
        dest="subcommand", required=True
    )
    run = evalp.add_parser("run", help="run the evaluation protocol from a config file")
    run.add_argument("--config", required=True)
    run.set_defaults(func=_cmd_eval_run)
    cross = evalp.add_parser("cross", help="cross-removal experiment from a config file")
    cross.add_argument("--config", required=True)
    cross.set_defaults(func=_cmd_eval_cross)

    reportp = top.add_parser("report", help="report rendering").add_subparsers(
        dest="subcommand", required=True
    )
    render = reportp.add_parser("render", help="re-render a JSON report")
    render.add_argument("--report", required=True)
    render.add_argument("--format", required=True, choices=["csv", "json"])
    render.add_argument("--out", required=True)
    render.set_defaults(func=_cmd_report_render)

    spectrum = top.add_parser("spectrum", help="spectrum visualization").add_subparsers(
        dest="subcommand", required=True
    )
    heatmap = spectrum.add_parser("heatmap", help="mean log-DCT heatmap of a directory")
    heatmap.add_argument("--images", required=True)
    heatmap.add_argument("--out", required=True)
    heatmap.add_argument("--count", type=int)
    heatmap.add_argument("--eps", type=float, default=EPS_DEFAULT)
    heatmap.set_defaults(func=_cmd_spectrum_heatmap)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except (ValidationError, FileFormatError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except CalibrationError as exc:
        print(f"calibration error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
