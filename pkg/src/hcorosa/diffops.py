"""Discrete derivative filters, their adjoints, and 2x2 eigen-operators.

All filtering is circular (periodic), which makes the flipped-stencil
adjoints exact and keeps the forward model consistent with the FFT-based
data term.  Stencils are stored as (row_offset, col_offset, coefficient)
triples; applying a stencil computes

    (d * s)(x, y) = sum_k c_k * s(x + ox_k, y + oy_k)   (indices mod N, M)

and the adjoint uses the flipped offsets.  The first grid axis plays the
role of x, the second of y.
"""

import numpy as np

from .imgcore import symmat_image, vector_image

# Backward first differences, centered second differences, 2x2 cross stencil.
STENCILS = {
    "dx": ((0, 0, 1.0), (-1, 0, -1.0)),
    "dy": ((0, 0, 1.0), (0, -1, -1.0)),
    "dxx": ((-1, 0, 1.0), (0, 0, -2.0), (1, 0, 1.0)),
    "dyy": ((0, -1, 1.0), (0, 0, -2.0), (0, 1, 1.0)),
    "dxy": ((0, 0, 1.0), (-1, -1, 1.0), (-1, 0, -1.0), (0, -1, -1.0)),
}

_SQRT2 = np.sqrt(2.0)


def filter_apply(s, name):
    """Circular convolution of a scalar image with one named stencil."""
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    for ox, oy, c in STENCILS[name]:
        out += c * np.roll(s, (-ox, -oy), axis=(0, 1))
    return out


def filter_adjoint(s, name):
    """Circular convolution with the flipped stencil (exact adjoint)."""
    s = np.asarray(s, dtype=np.float64)
    out = np.zeros_like(s)
    for ox, oy, c in STENCILS[name]:
        out += c * np.roll(s, (ox, oy), axis=(0, 1))
    return out


def grad(s):
    """First-order derivative pair (dx*s, dy*s) as a vector image."""
    return vector_image(filter_apply(s, "dx"), filter_apply(s, "dy"))


def grad_adjoint(v):
    """Adjoint of grad: dx^T*v1 + dy^T*v2."""
    return filter_adjoint(v[0], "dx") + filter_adjoint(v[1], "dy")


def hess(s):
    """Second-order derivative triple (dxx*s, dyy*s, dxy*s), packed."""
    return symmat_image(
        filter_apply(s, "dxx"), filter_apply(s, "dyy"), filter_apply(s, "dxy")
    )


def hess_adjoint(h):
    """Adjoint of hess under the packed inner product (off-diagonal once)."""
    return (
        filter_adjoint(h[0], "dxx")
        + filter_adjoint(h[1], "dyy")
        + filter_adjoint(h[2], "dxy")
    )


def hess_adjoint_fro(h):
    """Adjoint of hess under the Frobenius pairing (off-diagonal twice).

    The solver's second-order splitting block lives in Frobenius geometry,
    where the eigenvalue-shrinkage prox is the exact subproblem minimizer.
    """
    return (
        filter_adjoint(h[0], "dxx")
        + filter_adjoint(h[1], "dyy")
        + 2.0 * filter_adjoint(h[2], "dxy")
    )


def hess_frob(s):
    """Second-derivative 3-vector (dxx*s, dyy*s, sqrt(2)*dxy*s).

    Pointwise 2-norm of this stack is the Frobenius norm of the Hessian;
    used by the second-order TV route.
    """
    h = hess(s)
    h[2] *= _SQRT2
    return h


def hess_frob_adjoint(h):
    """Adjoint of hess_frob."""
    return (
        filter_adjoint(h[0], "dxx")
        + filter_adjoint(h[1], "dyy")
        + _SQRT2 * filter_adjoint(h[2], "dxy")
    )


def eig_vals(v):
    """Per-pixel eigenvalues (l1 >= l2) of packed symmetric matrices."""
    a, b, c = v[0], v[1], v[2]
    disc = np.sqrt((a - b) ** 2 + 4.0 * c * c)
    half = 0.5 * (a + b)
    return half + 0.5 * disc, half - 0.5 * disc


def eig_angle(v):
    """Angle theta in (-pi/2, pi/2] with [cos t, sin t] the l1-eigenvector.

    Isotropic pixels (equal eigenvalues) get theta = 0.
    """
    theta = 0.5 * np.arctan2(2.0 * v[2], v[0] - v[1])
    # arctan2(-0.0, negative) lands on -pi; fold to the equivalent +pi/2 axis
    theta = np.where(theta <= -0.5 * np.pi, theta + np.pi, theta)
    return theta


def eig_reconstruct(l1, l2, theta):
    """Rebuild packed matrices from eigenvalues and eigenvector angle."""
    l1 = np.asarray(l1, dtype=np.float64)
    l2 = np.asarray(l2, dtype=np.float64)
    theta = np.asarray(theta, dtype=np.float64)
    if not (l1.shape == l2.shape == theta.shape):
        raise ValueError("eigenvalue/angle shapes differ")
    ct, st = np.cos(theta), np.sin(theta)
    xx = l1 * ct * ct + l2 * st * st
    yy = l1 * st * st + l2 * ct * ct
    xy = (l1 - l2) * st * ct
    return np.stack([xx, yy, xy])


def csd(s):
    """Canonical second derivatives (H+, H-): eigenvalues of the Hessian."""
    return eig_vals(hess(s))


def laplacian(s):
    """dxx*s + dyy*s (trace of the Hessian)."""
    return filter_apply(s, "dxx") + filter_apply(s, "dyy")


def discriminant(s):
    """sqrt((dxx*s - dyy*s)^2 + 4*(dxy*s)^2), the eigenvalue gap."""
    h = hess(s)
    return np.sqrt((h[0] - h[1]) ** 2 + 4.0 * h[2] * h[2])
