"""Reconstruction from sparse k-space samples with multiresolution
spatially-adaptive regularization, plus baselines, mask generation,
measurement simulation, and scoring."""

from .adaptwt import AdaptiveWeights, FeatureTriple, TransformedWeights, \
    compute_features, eval_adaptive_reg, eval_barrier, inverse_transform, \
    solve_weights, transform, weights_from_guide
from .diffops import csd, eig_angle, eig_reconstruct, eig_vals, grad, \
    grad_adjoint, hess, hess_adjoint
from .fourier import ComplexSamples, SamplingMask, apply_adjoint, \
    apply_forward, calibrate_noise_sigma, full_mask, simulate_measurements, \
    zero_fill_invert
from .imgcore import inner_product, kron_scale, norm2, pointwise_norm, \
    symmat_image, vector_image
from .metrics import psnr, snr, ssim
from .multires import PyramidConfig, hcorosa, run_fixed_point, run_pyramid
from .phantoms import get_phantom, shepp_logan
from .proxops import BoxRange, prox_x, prox_y, prox_z, scalar_soft_threshold
from .resample import interpolate, interpolate_adjoint, restrict
from .sampling import MaskSpec, generate_mask
from .solver import ReconstructionReport, SolverConfig, SolverState, \
    eval_cost, reconstruct_adaptive, reconstruct_baseline

__version__ = "0.1.0"
