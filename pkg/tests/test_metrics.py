import numpy as np
import pytest

from hcorosa.errors import DegenerateReferenceError, DimensionError
from hcorosa.metrics import psnr, snr, ssim


def ssim_loop_oracle(ref, rec, dynamic_range):
    """Straight-line reimplementation: explicit windows, explicit kernel."""
    half = 5
    d = np.arange(-half, half + 1, dtype=float)
    k1d = np.exp(-(d * d) / (2 * 1.5**2))
    k1d /= k1d.sum()
    kernel = np.outer(k1d, k1d)
    c1 = (0.01 * dynamic_range) ** 2
    c2 = (0.03 * dynamic_range) ** 2
    n, m = ref.shape
    vals = []
    for i in range(half, n - half):
        for j in range(half, m - half):
            wx = ref[i - half : i + half + 1, j - half : j + half + 1]
            wy = rec[i - half : i + half + 1, j - half : j + half + 1]
            mx = float(np.sum(kernel * wx))
            my = float(np.sum(kernel * wy))
            vx = float(np.sum(kernel * wx * wx)) - mx * mx
            vy = float(np.sum(kernel * wy * wy)) - my * my
            cxy = float(np.sum(kernel * wx * wy)) - mx * my
            vals.append(
                ((2 * mx * my + c1) * (2 * cxy + c2))
                / ((mx * mx + my * my + c1) * (vx + vy + c2))
            )
    return float(np.mean(vals))


def test_snr_perfect_match_sentinel():
    a = np.ones((4, 4))
    assert snr(a, a.copy()) == np.inf


def test_snr_example_20db():
    ref = np.ones((2, 2))
    rec = np.full((2, 2), 0.9)
    assert snr(ref, rec) == pytest.approx(20.0, abs=1e-12)


def test_snr_halving_error_adds_6db():
    rng = np.random.default_rng(80)
    ref = rng.random((8, 8)) + 0.5
    err = rng.standard_normal((8, 8)) * 0.1
    a = snr(ref, ref + err)
    b = snr(ref, ref + 0.5 * err)
    assert b - a == pytest.approx(20.0 * np.log10(2.0), abs=1e-10)


def test_snr_scale_invariance():
    rng = np.random.default_rng(81)
    ref = rng.random((8, 8)) + 0.1
    rec = ref + 0.05 * rng.standard_normal((8, 8))
    assert snr(3.7 * ref, 3.7 * rec) == pytest.approx(snr(ref, rec), abs=1e-10)


def test_snr_errors():
    with pytest.raises(DimensionError):
        snr(np.ones((2, 2)), np.ones((3, 3)))
    with pytest.raises(DegenerateReferenceError):
        snr(np.zeros((2, 2)), np.ones((2, 2)))


def test_psnr_examples():
    a = np.ones((4, 4))
    assert psnr(a, a.copy()) == np.inf
    rec = a - 0.1
    assert psnr(a, rec) == pytest.approx(20.0, abs=1e-12)


def test_psnr_scale_invariance():
    rng = np.random.default_rng(82)
    ref = rng.random((8, 8)) + 0.1
    rec = ref + 0.02 * rng.standard_normal((8, 8))
    assert psnr(5.0 * ref, 5.0 * rec) == pytest.approx(psnr(ref, rec), abs=1e-10)


def test_ssim_identity_is_exactly_one():
    rng = np.random.default_rng(83)
    a = rng.random((32, 32))
    assert ssim(a, a.copy()) == 1.0


def test_ssim_constant_images():
    a = np.full((16, 16), 0.5)
    assert ssim(a, a.copy()) == 1.0  # zero-range guard, stabilized formula
    b = np.full((16, 16), 0.7)
    val = ssim(a, b)
    assert np.isfinite(val)
    assert val < 1.0


def test_ssim_matches_straight_line_oracle():
    rng = np.random.default_rng(84)
    ref = rng.random((24, 24))
    rec = np.clip(ref + 0.1 * rng.standard_normal((24, 24)), 0, 1)
    lo = float(np.max(ref) - np.min(ref))
    assert ssim(ref, rec) == pytest.approx(ssim_loop_oracle(ref, rec, lo), abs=1e-6)


def test_ssim_symmetric_with_fixed_range():
    rng = np.random.default_rng(85)
    a = rng.random((20, 20))
    b = rng.random((20, 20))
    assert ssim(a, b, dynamic_range=1.0) == pytest.approx(
        ssim(b, a, dynamic_range=1.0), abs=1e-12
    )


def test_ssim_decreases_with_noise():
    rng = np.random.default_rng(86)
    ref = rng.random((32, 32))
    light = np.clip(ref + 0.02 * rng.standard_normal((32, 32)), 0, 1)
    heavy = np.clip(ref + 0.3 * rng.standard_normal((32, 32)), 0, 1)
    assert ssim(ref, light) > ssim(ref, heavy)


def test_ssim_window_size_guard():
    with pytest.raises(DimensionError):
        ssim(np.ones((8, 8)), np.ones((8, 8)))


def test_ssim_bounds():
    rng = np.random.default_rng(87)
    a = rng.random((16, 16))
    b = rng.random((16, 16))
    val = ssim(a, b)
    assert -1.0 <= val <= 1.0
