"""Quantitative scores: SNR, SSIM, PSNR."""

import numpy as np
from scipy.ndimage import correlate1d

from .errors import DegenerateReferenceError, DimensionError

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_K1 = 0.01
SSIM_K2 = 0.03


def _check(ref, rec):
    ref = np.asarray(ref, dtype=np.float64)
    rec = np.asarray(rec, dtype=np.float64)
    if ref.shape != rec.shape:
        raise DimensionError(f"shape mismatch: {ref.shape} vs {rec.shape}")
    return ref, rec


def snr(ref, rec):
    """10*log10(sum(ref^2) / sum((ref-rec)^2)); +inf for a perfect match."""
    ref, rec = _check(ref, rec)
    signal = float(np.sum(ref * ref))
    if signal == 0.0:
        raise DegenerateReferenceError("reference image is identically zero")
    err = float(np.sum((ref - rec) ** 2))
    if err == 0.0:
        return np.inf
    return 10.0 * np.log10(signal / err)


def psnr(ref, rec):
    """20*log10(peak(ref) / rmse); peak is the max absolute reference value."""
    ref, rec = _check(ref, rec)
    peak = float(np.max(np.abs(ref)))
    if peak == 0.0:
        raise DegenerateReferenceError("reference image is identically zero")
    mse = float(np.mean((ref - rec) ** 2))
    if mse == 0.0:
        return np.inf
    return 20.0 * np.log10(peak / np.sqrt(mse))


def _gaussian_kernel():
    half = SSIM_WINDOW // 2
    d = np.arange(-half, half + 1, dtype=np.float64)
    k = np.exp(-(d * d) / (2.0 * SSIM_SIGMA ** 2))
    return k / k.sum()


def _windowed(img, k):
    half = SSIM_WINDOW // 2
    out = correlate1d(img, k, axis=0, mode="constant")
    out = correlate1d(out, k, axis=1, mode="constant")
    return out[half:-half, half:-half]


def ssim(ref, rec, dynamic_range=None):
    """Mean SSIM with an 11x11 Gaussian window (sigma 1.5), valid region only.

    The dynamic range defaults to max(ref) - min(ref); pass a fixed value to
    make the score symmetric in its two arguments.  A zero range (constant
    reference) falls back to 1.0 so the stabilized formula stays defined.
    """
    ref, rec = _check(ref, rec)
    if min(ref.shape) < SSIM_WINDOW:
        raise DimensionError(
            f"image {ref.shape} smaller than the {SSIM_WINDOW}x{SSIM_WINDOW} window"
        )
    if dynamic_range is None:
        dynamic_range = float(np.max(ref) - np.min(ref))
        if dynamic_range == 0.0:
            dynamic_range = 1.0
    c1 = (SSIM_K1 * dynamic_range) ** 2
    c2 = (SSIM_K2 * dynamic_range) ** 2
    k = _gaussian_kernel()
    mu_x = _windowed(ref, k)
    mu_y = _windowed(rec, k)
    var_x = _windowed(ref * ref, k) - mu_x * mu_x
    var_y = _windowed(rec * rec, k) - mu_y * mu_y
    cov = _windowed(ref * rec, k) - mu_x * mu_y
    num = (2.0 * mu_x * mu_y + c1) * (2.0 * cov + c2)
    den = (mu_x * mu_x + mu_y * mu_y + c1) * (var_x + var_y + c2)
    return float(np.mean(num / den))
