"""Fourier sampling operator, its adjoint, zero-filled inversion, noise model.

Conventions (fixed for the whole package):

* forward transform is the unnormalized 2-D DFT (numpy fft2), so a constant
  image c has DC sample c*rows*cols;
* the inverse carries the 1/(rows*cols) factor;
* the adjoint of the forward-and-gather operator is therefore
  rows*cols * Re(ifft2(zero-filled samples)), which satisfies
  Re<T s, m> = <s, T^H m> exactly;
* masks are stored in raw FFT index order with DC at (0, 0), which every
  mask must contain.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateReferenceError, DimensionError


@dataclass
class SamplingMask:
    """Binary k-space sampling pattern in raw FFT order (DC at (0, 0))."""

    grid: np.ndarray
    indices: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        g = np.asarray(self.grid)
        if g.ndim != 2:
            raise DimensionError(f"mask must be 2-D, got shape {g.shape}")
        if not np.all((g == 0) | (g == 1)):
            raise ValueError("mask values must be exactly 0 or 1")
        if g[0, 0] != 1:
            raise ValueError("mask must contain the DC location (0, 0)")
        self.grid = g.astype(np.uint8)
        self.indices = np.flatnonzero(self.grid.ravel())

    @property
    def rows(self):
        return self.grid.shape[0]

    @property
    def cols(self):
        return self.grid.shape[1]

    @property
    def sample_count(self):
        return int(self.indices.size)

    @property
    def density(self):
        return self.sample_count / self.grid.size


def full_mask(rows, cols):
    """Mask selecting every k-space position."""
    return SamplingMask(np.ones((rows, cols), dtype=np.uint8))


@dataclass
class ComplexSamples:
    """Measured k-space samples in raster order of the mask's set positions."""

    mask: SamplingMask
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.shape != (self.mask.sample_count,):
            raise DimensionError(
                f"expected {self.mask.sample_count} samples, got {self.values.shape}"
            )

    @property
    def rows(self):
        return self.mask.rows

    @property
    def cols(self):
        return self.mask.cols

    def zero_filled(self):
        """Samples scattered into a complex k-space array, zeros elsewhere."""
        z = np.zeros(self.mask.grid.shape, dtype=np.complex128)
        z.ravel()[self.mask.indices] = self.values
        return z


def apply_forward(s, mask):
    """Unnormalized 2-D DFT of s gathered at the mask positions."""
    s = np.asarray(s, dtype=np.float64)
    if s.shape != mask.grid.shape:
        raise DimensionError(f"image {s.shape} vs mask {mask.grid.shape}")
    spectrum = np.fft.fft2(s)
    return ComplexSamples(mask, spectrum.ravel()[mask.indices])


def apply_adjoint(m):
    """Exact adjoint of apply_forward, mapped back to a real image."""
    n = m.mask.grid.size
    return n * np.real(np.fft.ifft2(m.zero_filled()))


def zero_fill_invert(m):
    """Real part of the normalized inverse DFT of the zero-filled k-space."""
    return np.real(np.fft.ifft2(m.zero_filled()))


def masked_normal(s, mask_grid):
    """Re(ifft2(mask * fft2(s))) * rows * cols: the T^H T operator."""
    return mask_grid.size * np.real(
        np.fft.ifft2(mask_grid * np.fft.fft2(s))
    )


def calibrate_noise_sigma(ref, target_psnr_db):
    """Per-component AWGN sigma so full-mask zero-fill hits the target PSNR.

    Closed form: sigma = peak(ref) * sqrt(rows*cols) * 10**(-PSNR/20); the
    peak is the maximum absolute value of the reference.
    """
    ref = np.asarray(ref, dtype=np.float64)
    peak = float(np.max(np.abs(ref)))
    if peak == 0.0:
        raise DegenerateReferenceError("reference image is identically zero")
    return float(peak * np.sqrt(ref.size) * 10.0 ** (-target_psnr_db / 20.0))


def simulate_measurements(ref, mask, sigma, seed):
    """Forward samples of ref plus i.i.d. complex Gaussian noise.

    sigma is the standard deviation per real and per imaginary component;
    noise is drawn from a generator seeded with `seed` and added only at
    measured positions.
    """
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    clean = apply_forward(ref, mask)
    if sigma == 0.0:
        return clean
    rng = np.random.default_rng(seed)
    n = mask.sample_count
    noise = sigma * rng.standard_normal(n) + 1j * sigma * rng.standard_normal(n)
    return ComplexSamples(mask, clean.values + noise)
