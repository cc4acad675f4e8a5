"""Dyadic tent interpolation and its exact adjoint.

A single 2x step keeps coarse samples on even indices and places neighbor
averages on odd indices, with periodic wrap; factor 2^j is the j-fold
composition, equivalent to direct 2^j-fold linear interpolation.  Constants
map to constants (partition of unity) and adjoints are exact under the
standard inner product.
"""

import numpy as np

from .errors import DimensionError


def _up2(a, axis):
    n = a.shape[axis]
    shape = list(a.shape)
    shape[axis] = 2 * n
    out = np.empty(shape, dtype=np.float64)
    even = [slice(None)] * a.ndim
    odd = [slice(None)] * a.ndim
    even[axis] = slice(0, None, 2)
    odd[axis] = slice(1, None, 2)
    out[tuple(even)] = a
    out[tuple(odd)] = 0.5 * (a + np.roll(a, -1, axis=axis))
    return out


def _up2_adjoint(v, axis):
    even = [slice(None)] * v.ndim
    odd = [slice(None)] * v.ndim
    even[axis] = slice(0, None, 2)
    odd[axis] = slice(1, None, 2)
    ve = v[tuple(even)]
    vo = v[tuple(odd)]
    return ve + 0.5 * (vo + np.roll(vo, 1, axis=axis))


def interpolate(s_small, factor_log2):
    """2^factor_log2-fold separable tent upsampling; factor 0 is identity."""
    if factor_log2 < 0:
        raise ValueError("factor_log2 must be nonnegative")
    out = np.asarray(s_small, dtype=np.float64)
    for _ in range(factor_log2):
        out = _up2(_up2(out, 0), 1)
    return out


def interpolate_adjoint(s_big, factor_log2):
    """Exact adjoint of interpolate; input dims must be divisible by 2^f."""
    if factor_log2 < 0:
        raise ValueError("factor_log2 must be nonnegative")
    out = np.asarray(s_big, dtype=np.float64)
    f = 2 ** factor_log2
    if out.shape[0] % f or out.shape[1] % f:
        raise DimensionError(
            f"shape {out.shape} not divisible by 2^{factor_log2}"
        )
    for _ in range(factor_log2):
        out = _up2_adjoint(_up2_adjoint(out, 0), 1)
    return out


def restrict(s_big, factor_log2):
    """Subsample every 2^f-th pixel: the left inverse of interpolate."""
    f = 2 ** factor_log2
    s_big = np.asarray(s_big, dtype=np.float64)
    if s_big.shape[0] % f or s_big.shape[1] % f:
        raise DimensionError(
            f"shape {s_big.shape} not divisible by 2^{factor_log2}"
        )
    return s_big[::f, ::f].copy()
