"""Closed-form proximal maps for the three splitting variables.

Each map minimizes  penalty + (1/2)||input - variable||^2  per pixel, with
the penalty weight folded into the threshold argument (lambda/c in the
solver).  All maps are pixelwise and nonexpansive.
"""

from dataclasses import dataclass

import numpy as np

from .diffops import eig_angle, eig_reconstruct, eig_vals


@dataclass
class BoxRange:
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise ValueError(f"empty box [{self.lo}, {self.hi}]")


def scalar_soft_threshold(x, t):
    """sign(x) * max(0, |x| - t); t may be a scalar or an image."""
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)


def group_soft_threshold(vbar, t):
    """Blockwise shrinkage vbar * max(0, 1 - t/||vbar||) on a stacked field."""
    vbar = np.asarray(vbar, dtype=np.float64)
    n = np.sqrt(np.sum(vbar * vbar, axis=0))
    scale = np.where(n > t, 1.0 - t / np.where(n > 0, n, 1.0), 0.0)
    return vbar * scale


def prox_y(ybar, threshold):
    """Group soft-threshold of per-pixel 2-vectors (the y-subproblem)."""
    return group_soft_threshold(ybar, threshold)


def prox_z(zbar, zeta, threshold):
    """Eigenvalue shrinkage of packed symmetric matrices (the z-subproblem).

    Per pixel: eigen-decompose zbar, soft-threshold the larger eigenvalue
    with threshold*zeta and the smaller with threshold*(1-zeta), rebuild
    with the eigenvector angle unchanged.  Exact under the Frobenius
    metric, including the case where unequal thresholds would swap the
    eigenvalue order: there the minimizer sits on the equal-eigenvalue
    boundary, shrinking the mean by half the total threshold.
    """
    l1, l2 = eig_vals(zbar)
    theta = eig_angle(zbar)
    t1 = scalar_soft_threshold(l1, threshold * zeta)
    t2 = scalar_soft_threshold(l2, threshold * (1.0 - zeta))
    tie = scalar_soft_threshold(0.5 * (l1 + l2), 0.5 * threshold)
    crossed = t1 < t2
    t1 = np.where(crossed, tie, t1)
    t2 = np.where(crossed, tie, t2)
    return eig_reconstruct(t1, t2, theta)


def prox_x(xbar, box):
    """Clamp to the box (the x-subproblem)."""
    return np.clip(xbar, box.lo, box.hi)
