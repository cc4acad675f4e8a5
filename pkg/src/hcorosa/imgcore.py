"""Pixel-grid containers and their algebra.

Scalar images are plain 2-D float64 arrays.  Per-pixel 2-vectors and packed
symmetric 2x2 matrices are stacked along a leading axis:

* vector image  -- shape (2, rows, cols), components (v1, v2)
* matrix image  -- shape (3, rows, cols), components (xx, yy, xy)

The packed off-diagonal slot enters inner products once, so every adjoint in
the solver is taken with respect to the same bilinear form.
"""

import numpy as np

from .errors import DimensionError


def as_image(a):
    """Coerce to a finite 2-D float64 array, validating shape and values."""
    out = np.asarray(a, dtype=np.float64)
    if out.ndim != 2 or out.shape[0] < 1 or out.shape[1] < 1:
        raise DimensionError(f"expected a 2-D image, got shape {out.shape}")
    if not np.all(np.isfinite(out)):
        raise ValueError("image contains non-finite values")
    return out


def vector_image(v1, v2):
    """Stack two equal-shape scalar images into a per-pixel 2-vector field."""
    v1 = np.asarray(v1, dtype=np.float64)
    v2 = np.asarray(v2, dtype=np.float64)
    if v1.shape != v2.shape:
        raise DimensionError(f"component shapes differ: {v1.shape} vs {v2.shape}")
    return np.stack([v1, v2])


def symmat_image(xx, yy, xy):
    """Pack per-pixel symmetric 2x2 matrices [[xx, xy], [xy, yy]]."""
    xx = np.asarray(xx, dtype=np.float64)
    yy = np.asarray(yy, dtype=np.float64)
    xy = np.asarray(xy, dtype=np.float64)
    if not (xx.shape == yy.shape == xy.shape):
        raise DimensionError("component shapes differ")
    return np.stack([xx, yy, xy])


def inner_product(a, b):
    """Sum over pixels of the per-pixel inner product of a and b.

    Works for scalar, vector and packed-matrix fields of identical shape;
    the packed off-diagonal component is counted once.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sum(a * b))


def pointwise_norm(v):
    """Per-pixel Euclidean norm of the packed components of a stacked field."""
    v = np.asarray(v, dtype=np.float64)
    if v.ndim == 2:
        return np.abs(v)
    return np.sqrt(np.sum(v * v, axis=0))


def kron_scale(z, v):
    """Multiply every component of the field v pixelwise by the scalar image z."""
    z = np.asarray(z, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if z.shape != v.shape[-2:]:
        raise DimensionError(f"shape mismatch: {z.shape} vs {v.shape[-2:]}")
    return z * v


def norm2(a):
    """sqrt(inner_product(a, a))."""
    a = np.asarray(a, dtype=np.float64)
    return float(np.sqrt(np.sum(a * a)))
