"""Benchmark harness: methods x masks x densities x seeds on built-in phantoms.

Each row simulates noisy measurements of one phantom through one mask seed,
reconstructs with one method, and scores SNR/SSIM against the clean
reference.  Rows are fully independent; the worker count is bounded by the
caller (HCOROSA_THREADS through the CLI).  In deterministic mode the wall_s
column is written as 0.000 so repeated runs are byte-identical; real timing
is only reported in the run summary.
"""

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .fourier import calibrate_noise_sigma, simulate_measurements, zero_fill_invert
from .metrics import snr, ssim
from .multires import PyramidConfig, hcorosa
from .phantoms import get_phantom
from .sampling import MaskSpec, generate_mask
from .solver import SolverConfig, reconstruct_baseline

CSV_HEADER = "method,image,mask,density,noise,snr_db,ssim,iters,wall_s,seed"
METHODS = ("hcorosa", "corosa", "tv1", "tv2", "hs")

NOISE_SEED_OFFSET = 7919  # decouples the noise stream from the mask stream


@dataclass
class BenchConfig:
    methods: tuple = ("hcorosa", "hs", "tv1")
    images: tuple = ("shepp", "blobs", "wedges")
    size: int = 128
    mask_kind: str = "random"
    densities: tuple = (0.10, 0.20)
    seeds: tuple = tuple(range(10))
    noise_psnr_db: float | None = 20.0
    lambda_rel: float = 0.05
    tau: float = 0.5
    lambda_scale: float = 4.0
    max_scale: int = 2
    fixed_point_iters: int = 1
    max_admm_iters: int = 120
    primal_tol: float = 5e-4
    cg_tol: float = 1e-5
    cg_max_iters: int = 60

    def solver_config(self):
        lam = self.lambda_rel * self.size * self.size
        return SolverConfig(
            lam=lam,
            max_admm_iters=self.max_admm_iters,
            primal_tol=self.primal_tol,
            cg_tol=self.cg_tol,
            cg_max_iters=self.cg_max_iters,
        )

    def pyramid_config(self, corosa=False):
        return PyramidConfig(
            max_scale=self.max_scale,
            fixed_point_iters=self.fixed_point_iters,
            tau=self.tau,
            corosa=corosa,
            lambda_scale=self.lambda_scale,
        )


@dataclass
class BenchRow:
    method: str
    image: str
    mask: str
    density: float
    noise: str
    snr_db: float
    ssim: float
    iters: int
    wall_s: float
    seed: int
    extra: dict = field(default_factory=dict, repr=False)

    def csv(self, deterministic):
        wall = 0.0 if deterministic else self.wall_s
        return (
            f"{self.method},{self.image},{self.mask},{self.density:.4f},"
            f"{self.noise},{self.snr_db:.4f},{self.ssim:.6f},{self.iters},"
            f"{wall:.3f},{self.seed}"
        )


def run_method(method, m, cfg):
    """Reconstruct with one named method; returns (image, iters, extra)."""
    solver_cfg = cfg.solver_config()
    if method in ("hcorosa", "corosa"):
        out, report = hcorosa(m, cfg.pyramid_config(corosa=(method == "corosa")),
                              solver_cfg)
        seed_image = report.extras["pyramid"]["scale_images"][0][1]
        return out, report.iterations, {"pyramid_seed": seed_image}
    if method in ("tv1", "tv2", "hs"):
        out, report = reconstruct_baseline(method, zero_fill_invert(m), m,
                                           solver_cfg)
        return out, report.iterations, {}
    raise ValueError(f"unknown method {method!r}")


def _one_row(task, cfg):
    method, image, density, seed = task
    ref = get_phantom(image, cfg.size)
    mask = generate_mask(MaskSpec(cfg.mask_kind, cfg.size, cfg.size, density,
                                  seed=seed))
    if cfg.noise_psnr_db is None:
        sigma, noise_label = 0.0, "none"
    else:
        sigma = calibrate_noise_sigma(ref, cfg.noise_psnr_db)
        noise_label = f"psnr{cfg.noise_psnr_db:g}dB"
    m = simulate_measurements(ref, mask, sigma, seed + NOISE_SEED_OFFSET)
    t0 = time.perf_counter()
    try:
        out, iters, extra = run_method(method, m, cfg)
    except Exception as exc:  # record the failure, keep the run going
        return BenchRow(method, image, cfg.mask_kind, density, noise_label,
                        float("nan"), float("nan"), 0,
                        time.perf_counter() - t0, seed,
                        extra={"error": f"{type(exc).__name__}: {exc}"})
    wall = time.perf_counter() - t0
    row_extra = {}
    if "pyramid_seed" in extra:
        row_extra["seed_ssim"] = ssim(ref, extra["pyramid_seed"])
    return BenchRow(method, image, cfg.mask_kind, density, noise_label,
                    snr(ref, out), ssim(ref, out), iters, wall, seed,
                    extra=row_extra)


def run_bench(cfg, workers=0, progress=None):
    """All (method, image, density, seed) rows of the configured suite."""
    tasks = [
        (method, image, density, seed)
        for method in cfg.methods
        for image in cfg.images
        for density in cfg.densities
        for seed in cfg.seeds
    ]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda t: _one_row(t, cfg), tasks))
    else:
        rows = []
        for i, task in enumerate(tasks):
            rows.append(_one_row(task, cfg))
            if progress:
                progress(i + 1, len(tasks), rows[-1])
    return rows


def rows_to_csv(rows, deterministic=True):
    lines = [CSV_HEADER]
    lines.extend(row.csv(deterministic) for row in rows)
    return "\n".join(lines) + "\n"


def summarize(rows):
    """Mean SSIM/SNR per method over rows with finite scores."""
    out = {}
    for row in rows:
        if np.isfinite(row.ssim):
            out.setdefault(row.method, []).append((row.ssim, row.snr_db))
    return {
        method: {
            "mean_ssim": float(np.mean([s for s, _ in vals])),
            "mean_snr_db": float(np.mean([r for _, r in vals])),
            "rows": len(vals),
        }
        for method, vals in out.items()
    }
