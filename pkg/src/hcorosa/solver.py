"""ADMM reconstruction engine.

One iterate cycles the three closed-form proximal updates (y: group
shrinkage on the weighted gradient, z: eigenvalue shrinkage on the weighted
second derivatives, x: box projection), a conjugate-gradient solve of the
quadratic s-subproblem, and the three scaled multiplier updates.  The
s-subproblem normal operator is

    E^T [ g^T(gamma^2 (+) g E s) + h^T((1-gamma)^2 (+) h E s)
          + (2/c) F^H M F (E s) + E s ]

with E the 2^j-fold interpolator of the scale-(j) variant, M the k-space
mask, and the data term realized by FFT filtering (exact under the circular
convention).  The second-order branch runs either on eigenvalue shrinkage
(adaptive / tv1 / hs weights) or on plain block shrinkage of the
(dxx, dyy, sqrt2*dxy) stack (the second-order TV baseline).
"""

import json
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .adaptwt import AdaptiveWeights, TransformedWeights, eval_adaptive_reg, \
    inverse_transform, transform
from .diffops import grad, grad_adjoint, hess, hess_adjoint_fro, hess_frob, \
    hess_frob_adjoint
from .errors import DimensionError, NumericalError
from .fourier import apply_adjoint, apply_forward, masked_normal
from .imgcore import kron_scale, norm2, pointwise_norm
from .proxops import BoxRange, group_soft_threshold, prox_x, prox_y, prox_z
from .resample import interpolate, interpolate_adjoint, restrict


@dataclass
class SolverConfig:
    """Knobs of one ADMM run.

    lam is the absolute trade-off weight of J = F + lam*R; with the
    unnormalized-DFT data term a useful lam grows with the pixel count
    (the CLI exposes lambda-rel = lam / (rows*cols) for that reason).
    penalty_c = None resolves to 2*rows*cols, which scales the data term of
    the s-subproblem to unit spectral norm and makes the prox thresholds
    lam/c the per-pixel trade-off weight.
    """

    lam: float
    penalty_c: float | None = None
    max_admm_iters: int = 300
    primal_tol: float = 1e-4
    cg_tol: float = 1e-6
    cg_max_iters: int = 200
    box: BoxRange = field(default_factory=lambda: BoxRange(0.0, 1.05))
    log_cost: bool = False

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lam must be nonnegative")
        if self.penalty_c is not None and self.penalty_c <= 0:
            raise ValueError("penalty_c must be positive")
        for name in ("primal_tol", "cg_tol"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def resolve_c(self, rows, cols):
        return self.penalty_c if self.penalty_c is not None else 2.0 * rows * cols


@dataclass
class SolverState:
    """ADMM variables: coarse image, splitting variables, multipliers."""

    sbar: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    xhat: np.ndarray
    yhat: np.ndarray
    zhat: np.ndarray
    iter: int = 0


@dataclass
class ReconstructionReport:
    iterations: int
    residuals: list
    data_error: float
    regularizer: float
    wall_time_s: float
    converged: bool
    lam: float
    cost_history: list = field(default_factory=list)
    extras: dict = field(default_factory=dict, repr=False)

    def to_dict(self):
        return {
            "iterations": self.iterations,
            "residuals": [list(r) for r in self.residuals],
            "F": self.data_error,
            "R": self.regularizer,
            "wall_time_s": self.wall_time_s,
            "converged": self.converged,
            "lambda": self.lam,
        }

    def to_json(self, indent=None):
        return json.dumps(self.to_dict(), indent=indent)


def _second_order(u, mode):
    return hess_frob(u) if mode == "frob" else hess(u)


def _second_order_adjoint(h, mode):
    # eig mode pairs the packed matrices with the Frobenius product, the
    # geometry in which the eigenvalue-shrinkage prox is exact
    return hess_frob_adjoint(h) if mode == "frob" else hess_adjoint_fro(h)


def _second_order_norm(d, mode):
    if mode == "frob":
        return norm2(d)
    return float(np.sqrt(np.sum(d[0] ** 2 + d[1] ** 2 + 2.0 * d[2] ** 2)))


def normal_apply(sbar, gamma, mask, scale_j, penalty_c, second_order="eig"):
    """Left-hand side of the s-subproblem normal equations."""
    u = interpolate(sbar, scale_j)
    if u.shape != mask.grid.shape:
        raise DimensionError(
            f"scale-{scale_j} image {u.shape} vs mask {mask.grid.shape}"
        )
    out = grad_adjoint(kron_scale(gamma * gamma, grad(u)))
    w2 = (1.0 - gamma) ** 2
    out += _second_order_adjoint(kron_scale(w2, _second_order(u, second_order)),
                                 second_order)
    out += (2.0 / penalty_c) * masked_normal(u, mask.grid)
    out += u
    return interpolate_adjoint(out, scale_j)


def _cg(apply_a, b, x0, tol, max_iters):
    """Conjugate gradients with warm start; stops on relative residual."""
    b_norm = norm2(b)
    if b_norm == 0.0:
        return np.zeros_like(b), 0
    x = x0.copy()
    r = b - apply_a(x)
    p = r.copy()
    rs = float(np.sum(r * r))
    for iters in range(max_iters):
        if np.sqrt(rs) <= tol * b_norm:
            return x, iters
        ap = apply_a(p)
        pap = float(np.sum(p * ap))
        alpha = rs / pap
        if not np.isfinite(alpha) or pap <= 0.0:
            raise NumericalError(
                "conjugate gradient breakdown",
                {"iteration": iters, "pAp": pap, "residual": np.sqrt(rs)},
            )
        x += alpha * p
        r -= alpha * ap
        rs_new = float(np.sum(r * r))
        p = r + (rs_new / rs) * p
        rs = rs_new
    return x, max_iters


def solve_s(state, weights, m, cfg, scale_j, second_order="eig"):
    """CG solution of the s-subproblem, warm-started at the current sbar."""
    rows, cols = m.mask.grid.shape
    c = cfg.resolve_c(rows, cols)
    gamma = weights.gamma
    ytil = state.y - state.yhat / c
    ztil = state.z - state.zhat / c
    xtil = state.x - state.xhat / c
    rhs = grad_adjoint(kron_scale(gamma, ytil))
    rhs += _second_order_adjoint(kron_scale(1.0 - gamma, ztil), second_order)
    rhs += xtil
    rhs += (2.0 / c) * apply_adjoint(m)
    b = interpolate_adjoint(rhs, scale_j)

    def apply_a(v):
        return normal_apply(v, gamma, m.mask, scale_j, c, second_order)

    x, _ = _cg(apply_a, b, state.sbar, cfg.cg_tol, cfg.cg_max_iters)
    return x


def init_state(sbar0, weights, m, cfg, scale_j, second_order="eig"):
    """Splitting variables consistent with sbar0, multipliers at zero."""
    u = interpolate(sbar0, scale_j)
    gamma = weights.gamma
    y = kron_scale(gamma, grad(u))
    z = kron_scale(1.0 - gamma, _second_order(u, second_order))
    x = prox_x(u, cfg.box)
    return SolverState(
        sbar=np.array(sbar0, dtype=np.float64),
        x=x, y=y, z=z,
        xhat=np.zeros_like(u), yhat=np.zeros_like(y), zhat=np.zeros_like(z),
    )


def admm_step(state, weights, m, cfg, scale_j, second_order="eig"):
    """One full cycle: y, z, x proxes, s-CG, multiplier updates.

    Returns (next_state, residuals) where residuals are the three primal
    constraint norms at the new iterate.
    """
    rows, cols = m.mask.grid.shape
    c = cfg.resolve_c(rows, cols)
    gamma, zeta = weights.gamma, weights.zeta
    thr = cfg.lam / c

    u = interpolate(state.sbar, scale_j)
    gy = kron_scale(gamma, grad(u))
    y = prox_y(gy + state.yhat / c, thr)
    hz = kron_scale(1.0 - gamma, _second_order(u, second_order))
    zbar = hz + state.zhat / c
    if second_order == "frob":
        z = group_soft_threshold(zbar, thr)
    else:
        z = prox_z(zbar, zeta, thr)
    x = prox_x(u + state.xhat / c, cfg.box)

    interim = replace(state, x=x, y=y, z=z)
    sbar = solve_s(interim, weights, m, cfg, scale_j, second_order)

    u1 = interpolate(sbar, scale_j)
    gy1 = kron_scale(gamma, grad(u1))
    hz1 = kron_scale(1.0 - gamma, _second_order(u1, second_order))
    yhat = state.yhat + c * (gy1 - y)
    zhat = state.zhat + c * (hz1 - z)
    xhat = state.xhat + c * (u1 - x)
    residuals = (norm2(gy1 - y), _second_order_norm(hz1 - z, second_order),
                 norm2(u1 - x))
    next_state = SolverState(
        sbar=sbar, x=x, y=y, z=z,
        xhat=xhat, yhat=yhat, zhat=zhat, iter=state.iter + 1,
    )
    return next_state, residuals


def _coerce_init(init, rows, cols, scale_j):
    init = np.asarray(init, dtype=np.float64)
    small = (rows >> scale_j, cols >> scale_j)
    if init.shape == small:
        return init
    if init.shape == (rows, cols):
        return restrict(init, scale_j)
    raise DimensionError(
        f"init shape {init.shape} matches neither {small} nor {(rows, cols)}"
    )


def _eval_reg(s, beta, second_order):
    if second_order == "frob":
        return float(np.sum(pointwise_norm(hess_frob(s))))
    return eval_adaptive_reg(s, beta)


def eval_cost(s, weights, m, lam):
    """(F, R, J): complex data error, adaptive regularizer value, their sum."""
    diff = apply_forward(s, m.mask).values - m.values
    f = float(np.sum(np.abs(diff) ** 2))
    r = eval_adaptive_reg(s, weights)
    return f, r, f + lam * r


def _run_admm(sbar0, tw, beta, m, cfg, scale_j, second_order):
    rows, cols = m.mask.grid.shape
    t0 = time.perf_counter()
    state = init_state(sbar0, tw, m, cfg, scale_j, second_order)
    stop = cfg.primal_tol * np.sqrt(rows * cols)
    history = []
    costs = []
    converged = False
    while state.iter < cfg.max_admm_iters:
        state, res = admm_step(state, tw, m, cfg, scale_j, second_order)
        history.append(res)
        if cfg.log_cost:
            s_full = interpolate(state.sbar, scale_j)
            diff = apply_forward(s_full, m.mask).values - m.values
            f = float(np.sum(np.abs(diff) ** 2))
            r = _eval_reg(s_full, beta, second_order)
            costs.append((f, r, f + cfg.lam * r))
        if max(res) <= stop:
            converged = True
            break
    out = interpolate(state.sbar, scale_j)
    diff = apply_forward(out, m.mask).values - m.values
    f = float(np.sum(np.abs(diff) ** 2))
    r = _eval_reg(out, beta, second_order)
    report = ReconstructionReport(
        iterations=state.iter,
        residuals=history,
        data_error=f,
        regularizer=r,
        wall_time_s=time.perf_counter() - t0,
        converged=converged,
        lam=cfg.lam,
        cost_history=costs,
    )
    return out, report


def reconstruct_adaptive(init, weights, m, cfg, scale_j=0):
    """Adaptive reconstruction at scale j with fixed weight images.

    `weights` may be an AdaptiveWeights simplex triple or an already
    transformed (gamma, zeta) pair; `init` may be given at the coarse
    scale-j size or at full size (it is then subsampled).  Non-convergence
    returns the best iterate with report.converged = False, not an error.
    """
    rows, cols = m.mask.grid.shape
    if isinstance(weights, TransformedWeights):
        tw, beta = weights, inverse_transform(weights)
    else:
        tw, beta = transform(weights), weights
    if tw.gamma.shape != (rows, cols):
        raise DimensionError(
            f"weights {tw.gamma.shape} vs k-space grid {(rows, cols)}"
        )
    sbar0 = _coerce_init(init, rows, cols, scale_j)
    return _run_admm(sbar0, tw, beta, m, cfg, scale_j, "eig")


BASELINE_KINDS = ("tv1", "tv2", "hs")


def reconstruct_baseline(kind, init, m, cfg, scale_j=0):
    """Non-adaptive runs: first-order TV, second-order TV, Hessian nuclear.

    tv1 and hs reuse the adaptive engine with collapsed constant weights
    (hs doubles lam since the collapsed regularizer is half the nuclear
    norm); tv2 swaps the eigenvalue prox for block shrinkage on the
    (dxx, dyy, sqrt2*dxy) stack.
    """
    rows, cols = m.mask.grid.shape
    shape = (rows, cols)
    sbar0 = _coerce_init(init, rows, cols, scale_j)
    if kind == "tv1":
        w = AdaptiveWeights.constant(shape, 1.0, 0.0, 0.0)
        return reconstruct_adaptive(sbar0, w, m, cfg, scale_j)
    if kind == "hs":
        w = AdaptiveWeights.constant(shape, 0.0, 0.5, 0.5)
        return reconstruct_adaptive(sbar0, w, m, replace(cfg, lam=2.0 * cfg.lam),
                                    scale_j)
    if kind == "tv2":
        tw = TransformedWeights(np.zeros(shape), np.full(shape, 0.5))
        beta = inverse_transform(tw)
        return _run_admm(sbar0, tw, beta, m, cfg, scale_j, "frob")
    raise ValueError(f"unknown baseline kind {kind!r}")
