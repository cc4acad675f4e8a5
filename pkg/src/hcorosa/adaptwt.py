"""Spatially adaptive weights from a guide image.

The weight triple (beta1, beta2, beta3) at each pixel minimizes

    beta1*Y1 + beta2*Y2 + beta3*Y3 - tau * log(beta1*beta2*beta3)

on the simplex, where Y1 is the guide's gradient magnitude and Y2, Y3 the
magnitudes of its two Hessian eigenvalues.  The minimizer has the closed
form beta_i = tau / (Y_i + phi) with the multiplier phi fixed per pixel by
bisection so the weights sum to one.
"""

from dataclasses import dataclass

import numpy as np

from .diffops import csd, grad
from .errors import DimensionError, ParameterError
from .imgcore import pointwise_norm

BISECT_TOL = 1e-12
BISECT_MAX_ITERS = 200


@dataclass
class FeatureTriple:
    """Gradient magnitude and |H+|, |H-| of a guide image."""

    y1: np.ndarray
    y2: np.ndarray
    y3: np.ndarray

    def stack(self):
        return np.stack([self.y1, self.y2, self.y3])


@dataclass
class AdaptiveWeights:
    """Per-pixel simplex triple weighting gradient and the two CSDs."""

    beta1: np.ndarray
    beta2: np.ndarray
    beta3: np.ndarray

    def stack(self):
        return np.stack([self.beta1, self.beta2, self.beta3])

    @classmethod
    def constant(cls, shape, b1, b2, b3):
        return cls(
            np.full(shape, float(b1)),
            np.full(shape, float(b2)),
            np.full(shape, float(b3)),
        )


@dataclass
class TransformedWeights:
    """(gamma, zeta) parametrization used by the splitting solver."""

    gamma: np.ndarray
    zeta: np.ndarray


def compute_features(guide):
    """Y1 = ||grad||, Y2 = |H+|, Y3 = |H-| of the guide image."""
    hplus, hminus = csd(guide)
    return FeatureTriple(pointwise_norm(grad(guide)), np.abs(hplus), np.abs(hminus))


def solve_weights(features, tau):
    """Barrier-regularized simplex weights via per-pixel bisection on phi.

    The bracket [tau - Ymin, 3*tau - Ymin] always contains the root (the
    weight sum is 1 exactly at its upper end when all features tie) and is
    expanded geometrically if numerics ever push the root outside.
    """
    if tau <= 0:
        raise ParameterError("tau must be positive")
    y = features.stack()
    y_min = np.min(y, axis=0)
    lo = tau - y_min
    hi = 3.0 * tau - y_min

    def weight_sum(phi):
        return np.sum(tau / (y + phi), axis=0)

    # geometric expansion guard; mathematically the root never escapes
    width = hi - lo
    for _ in range(64):
        bad = weight_sum(hi) > 1.0
        if not np.any(bad):
            break
        width = 2.0 * width
        hi = np.where(bad, lo + width, hi)

    phi = 0.5 * (lo + hi)
    for _ in range(BISECT_MAX_ITERS):
        s = weight_sum(phi)
        if np.all(np.abs(s - 1.0) <= BISECT_TOL):
            break
        high = s > 1.0  # sum decreases in phi
        lo = np.where(high, phi, lo)
        hi = np.where(high, hi, phi)
        phi = 0.5 * (lo + hi)
    beta = tau / (y + phi)
    return AdaptiveWeights(beta[0], beta[1], beta[2])


def transform(w):
    """Map simplex weights to (gamma, zeta); ties at beta2+beta3=0 give 0.5."""
    second = w.beta2 + w.beta3
    gamma = 1.0 - second
    zeta = np.where(second > 0, w.beta2 / np.where(second > 0, second, 1.0), 0.5)
    return TransformedWeights(gamma, zeta)


def inverse_transform(tw):
    """Recover simplex weights from (gamma, zeta)."""
    rest = 1.0 - tw.gamma
    return AdaptiveWeights(tw.gamma.copy(), rest * tw.zeta, rest * (1.0 - tw.zeta))


def eval_adaptive_reg(s, w):
    """Sum over pixels of beta1*||grad s|| + beta2*|H+ s| + beta3*|H- s|."""
    s = np.asarray(s, dtype=np.float64)
    if s.shape != w.beta1.shape:
        raise DimensionError(f"image {s.shape} vs weights {w.beta1.shape}")
    hplus, hminus = csd(s)
    return float(
        np.sum(
            w.beta1 * pointwise_norm(grad(s))
            + w.beta2 * np.abs(hplus)
            + w.beta3 * np.abs(hminus)
        )
    )


def eval_barrier(w, tau):
    """-tau * sum(log(beta1*beta2*beta3)); infinite outside the open simplex."""
    product = w.beta1 * w.beta2 * w.beta3
    if np.any(product <= 0):
        raise ParameterError("barrier requires strictly positive weights")
    return float(-tau * np.sum(np.log(product)))


def weights_from_guide(guide, tau_rel, equal_csd=False):
    """Features -> weights with the barrier weight scaled to the guide.

    tau_rel is dimensionless; the absolute barrier weight is
    tau_rel * mean((Y1+Y2+Y3)/3).  With equal_csd=True the two eigenvalue
    features are replaced by their mean, which forces beta2 = beta3
    (zeta = 1/2), the precursor method's restriction.

    Returns (weights, tau_abs).
    """
    feats = compute_features(guide)
    if equal_csd:
        mid = 0.5 * (feats.y2 + feats.y3)
        feats = FeatureTriple(feats.y1, mid, mid.copy())
    scale = float(np.mean((feats.y1 + feats.y2 + feats.y3) / 3.0))
    tau_abs = tau_rel * scale if scale > 0 else 1.0
    return solve_weights(feats, tau_abs), tau_abs
