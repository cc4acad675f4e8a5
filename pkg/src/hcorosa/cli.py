"""Command-line surface: mask | simulate | reconstruct | evaluate | bench.

Exit codes: 0 ok, 2 input error, 3 numerical failure.  Every command is
deterministic for fixed flags and seed when HCOROSA_THREADS is unset or 0.
Flag values beat config-file values beat built-in defaults; config files
are flat key=value text with keys spelled like the long flags
(hyphens may be written as underscores).
"""

import argparse
import json
import os
import sys

import numpy as np

from . import bench as bench_mod
from . import fileio
from .errors import DensityUnreachableError, NumericalError
from .fourier import calibrate_noise_sigma, simulate_measurements, zero_fill_invert
from .metrics import psnr, snr, ssim
from .multires import PyramidConfig, hcorosa
from .sampling import KINDS, MaskSpec, generate_mask
from .solver import BASELINE_KINDS, SolverConfig, reconstruct_baseline

CLI_METHODS = ("hcorosa", "corosa", "tv1", "tv2", "hs")


def _read_config(path):
    values = {}
    if not path:
        return values
    with open(path) as fh:
        for line in fh:
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad config line: {line!r}")
            key, val = line.split("=", 1)
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _pick(args, config, key, default, cast=float):
    """flags > config file > default; flag defaults are None sentinels."""
    flag = getattr(args, key, None)
    if flag is not None:
        return flag
    if key in config:
        return cast(config[key])
    return default


def _parse_list(text, cast):
    return tuple(cast(tok) for tok in str(text).split(",") if tok != "")


def cmd_mask(args):
    rows = args.rows or args.size
    cols = args.cols or args.size
    if rows is None or cols is None:
        raise ValueError("give --size or both --rows and --cols")
    spec = MaskSpec(args.kind, rows, cols, args.density, seed=args.seed,
                    tolerance=args.tolerance)
    mask = generate_mask(spec)
    fileio.write_mask(args.output, mask)
    print(f"wrote {args.output}: {mask.sample_count} samples, "
          f"achieved density {mask.density:.4f} (requested {args.density:.4f})")
    return 0


def cmd_simulate(args):
    image = fileio.load_image(args.image)
    mask = fileio.read_mask(args.mask)
    if image.shape != mask.grid.shape:
        raise ValueError(f"image {image.shape} vs mask {mask.grid.shape}")
    normalized, factor = fileio.normalize(image)
    modes = [args.noise_psnr is not None, args.noise_sigma is not None,
             args.noise_none]
    if sum(modes) != 1:
        raise ValueError(
            "give exactly one of --noise-psnr, --noise-sigma, --noise-none"
        )
    if args.noise_none:
        sigma, mode = 0.0, "none"
    elif args.noise_sigma is not None:
        sigma, mode = args.noise_sigma, "sigma"
    else:
        sigma, mode = calibrate_noise_sigma(normalized, args.noise_psnr), "psnr"
    m = simulate_measurements(normalized, mask, sigma, args.seed)
    fileio.write_samples(args.output, m)
    meta = args.output + ".meta"
    with open(meta, "w") as fh:
        fh.write(f"sigma={sigma:.17g}\nseed={args.seed}\n")
        fh.write(f"normalization={factor:.17g}\nnoise_mode={mode}\n")
        fh.write(f"rows={mask.rows}\ncols={mask.cols}\n")
    print(f"wrote {args.output} ({m.values.size} samples, sigma={sigma:.6g}); "
          f"sidecar {meta}")
    return 0


def cmd_reconstruct(args):
    config = _read_config(args.config)
    m = fileio.read_samples(args.measurement)
    rows, cols = m.mask.grid.shape
    method = _pick(args, config, "method", "hcorosa", str)
    if method not in CLI_METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {CLI_METHODS}")
    lam = _pick(args, config, "lam", None)
    if lam is None:
        lam = _pick(args, config, "lambda_rel", 0.05) * rows * cols
    solver_cfg = SolverConfig(
        lam=lam,
        max_admm_iters=int(_pick(args, config, "max_iters", 300, int)),
        primal_tol=_pick(args, config, "primal_tol", 1e-4),
        cg_tol=_pick(args, config, "cg_tol", 1e-6),
        cg_max_iters=int(_pick(args, config, "cg_max_iters", 200, int)),
    )
    try:
        if method in BASELINE_KINDS:
            out, report = reconstruct_baseline(method, zero_fill_invert(m), m,
                                               solver_cfg)
        else:
            pyr = PyramidConfig(
                max_scale=int(_pick(args, config, "max_scale", 2, int)),
                fixed_point_iters=int(
                    _pick(args, config, "fixed_point_iters", 2, int)),
                tau=_pick(args, config, "tau", 0.5),
                corosa=(method == "corosa"),
            )
            out, report = hcorosa(m, pyr, solver_cfg)
    except NumericalError as exc:
        report_path = args.report or args.output + ".json"
        with open(report_path, "w") as fh:
            json.dump({"error": str(exc), "diagnostics": exc.diagnostics}, fh)
        raise
    fileio.write_image(args.output, out)
    if args.pgm:
        fileio.write_pgm(args.pgm, out)
    report_path = args.report or args.output + ".json"
    with open(report_path, "w") as fh:
        fh.write(report.to_json(indent=2))
    print(f"wrote {args.output} ({method}, {report.iterations} iterations, "
          f"F={report.data_error:.6g}, R={report.regularizer:.6g}); "
          f"report {report_path}")
    return 0


def cmd_evaluate(args):
    ref, _ = fileio.normalize(fileio.load_image(args.ref))
    rec, _ = fileio.normalize(fileio.load_image(args.rec))
    if ref.shape != rec.shape:
        raise ValueError(f"shape mismatch: {ref.shape} vs {rec.shape}")
    scores = {
        "snr_db": snr(ref, rec),
        "ssim": ssim(ref, rec, dynamic_range=args.fixed_range),
        "psnr_db": psnr(ref, rec),
    }
    print(" ".join(f"{k}={v:.6f}" for k, v in scores.items()))
    if args.csv:
        new = not os.path.exists(args.csv)
        with open(args.csv, "a") as fh:
            if new:
                fh.write("ref,rec,snr_db,ssim,psnr_db\n")
            fh.write(f"{args.ref},{args.rec},{scores['snr_db']:.6f},"
                     f"{scores['ssim']:.6f},{scores['psnr_db']:.6f}\n")
    return 0


def cmd_bench(args):
    config = _read_config(args.config)
    noise = None if args.noise_none else _pick(args, config, "noise_psnr", 20.0)
    seeds = _pick(args, config, "seeds", "10", str)
    seed_list = tuple(range(int(seeds))) if "," not in str(seeds) \
        else _parse_list(seeds, int)
    cfg = bench_mod.BenchConfig(
        methods=_parse_list(_pick(args, config, "methods", "hcorosa,hs,tv1", str), str),
        images=_parse_list(_pick(args, config, "images", "shepp,blobs,wedges", str), str),
        size=int(_pick(args, config, "size", 128, int)),
        mask_kind=_pick(args, config, "mask_kind", "random", str),
        densities=_parse_list(_pick(args, config, "densities", "0.10,0.20", str), float),
        seeds=seed_list,
        noise_psnr_db=noise,
        lambda_rel=_pick(args, config, "lambda_rel", 0.05),
        tau=_pick(args, config, "tau", 0.5),
        max_scale=int(_pick(args, config, "max_scale", 2, int)),
        fixed_point_iters=int(_pick(args, config, "fixed_point_iters", 1, int)),
        max_admm_iters=int(_pick(args, config, "max_iters", 120, int)),
    )
    for method in cfg.methods:
        if method not in CLI_METHODS:
            raise ValueError(f"unknown method {method!r}")
    workers = int(os.environ.get("HCOROSA_THREADS", "0") or 0)
    deterministic = workers <= 1

    def progress(done, total, row):
        print(f"[{done}/{total}] {row.method} {row.image} d={row.density:.2f} "
              f"seed={row.seed} ssim={row.ssim:.4f}", file=sys.stderr)

    rows = bench_mod.run_bench(cfg, workers=workers,
                               progress=progress if args.verbose else None)
    with open(args.output, "w") as fh:
        fh.write(bench_mod.rows_to_csv(rows, deterministic=deterministic))
    summary = bench_mod.summarize(rows)
    for method, stats in sorted(summary.items()):
        print(f"{method}: mean SSIM {stats['mean_ssim']:.4f}, "
              f"mean SNR {stats['mean_snr_db']:.2f} dB over {stats['rows']} rows")
    failures = [r for r in rows if not np.isfinite(r.ssim)]
    if failures:
        print(f"{len(failures)} row(s) failed; see extra fields", file=sys.stderr)
    print(f"wrote {args.output} ({len(rows)} rows)")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="hcorosa",
        description="Reconstruction from sparse k-space samples with "
                    "multiresolution spatially-adaptive regularization.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mask", help="generate a sampling mask file")
    p.add_argument("--kind", choices=KINDS, required=True)
    p.add_argument("--size", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--density", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tolerance", type=float, default=0.005)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("simulate", help="simulate noisy k-space measurements")
    p.add_argument("--image", required=True)
    p.add_argument("--mask", required=True)
    p.add_argument("--noise-psnr", type=float)
    p.add_argument("--noise-sigma", type=float)
    p.add_argument("--noise-none", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("reconstruct", help="reconstruct an image from samples")
    p.add_argument("--measurement", required=True)
    p.add_argument("--method", choices=CLI_METHODS)
    p.add_argument("--lambda", dest="lam", type=float)
    p.add_argument("--lambda-rel", dest="lambda_rel", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--max-scale", type=int)
    p.add_argument("--fixed-point-iters", type=int)
    p.add_argument("--max-iters", type=int)
    p.add_argument("--primal-tol", type=float)
    p.add_argument("--cg-tol", type=float)
    p.add_argument("--cg-max-iters", type=int)
    p.add_argument("--config")
    p.add_argument("--pgm")
    p.add_argument("--report")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("evaluate", help="score a reconstruction against a reference")
    p.add_argument("--ref", required=True)
    p.add_argument("--rec", required=True)
    p.add_argument("--fixed-range", type=float)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("bench", help="run the benchmark suite")
    p.add_argument("--methods")
    p.add_argument("--images")
    p.add_argument("--size", type=int)
    p.add_argument("--mask-kind", dest="mask_kind", choices=KINDS)
    p.add_argument("--densities")
    p.add_argument("--seeds", help="a count or a comma list")
    p.add_argument("--noise-psnr", dest="noise_psnr", type=float)
    p.add_argument("--noise-none", action="store_true")
    p.add_argument("--lambda-rel", dest="lambda_rel", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--max-scale", dest="max_scale", type=int)
    p.add_argument("--fixed-point-iters", dest="fixed_point_iters", type=int)
    p.add_argument("--max-iters", dest="max_iters", type=int)
    p.add_argument("--config")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except (OSError, ValueError, DensityUnreachableError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
