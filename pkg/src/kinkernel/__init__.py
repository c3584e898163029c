"""Fundamental solution of the fractional Kolmogorov equation in one dimension.

Evaluation of ``p_s(t, x, v)`` and the recentred kernel ``k_s(x, v)`` by Fourier
inversion, the closed form at s = 1/2, contour representations, asymptotic
constants along rays and empirical checks of the two-sided bound.
"""

__version__ = "0.1.0"

from .errors import ConvergenceError, DomainError, KinkernelError, SingularityError, VerificationError
from .symbol import FracOrder, PhasePoint, envelope_j, envelope_thm, phi
from .fourier_kernel import (KernelValue, Method, QuadSpec, k_eval, kolmogorov_gaussian, mass, p_direct,
                             p_eval, q_cdf, q_eval)
from .closed_half import AppendixArgs, F_closed, F_integrand, k_half, k_half_error, k_half_semi
from .path_reps import RayPath, cancellation_identity, k_via_v_rep, k_via_x_rep, ray_gamma_identity, ray_gamma_integral
from .asymptotics import (AsymptoticConstant, FracLaplaceOrder, Route, SpatialRegimeInput, VelocityRegimeInput, c_s1,
                          c_s3, frac_pv, gauss_2f1, split_check)
from .bounds import RatioReport, RayKind, RaySpec, Rect, ratio_grid, ray_limit

__all__ = [
    "AppendixArgs", "AsymptoticConstant", "ConvergenceError", "DomainError", "F_closed", "F_integrand",
    "FracLaplaceOrder", "FracOrder", "KernelValue", "KinkernelError", "Method", "PhasePoint", "QuadSpec",
    "RatioReport", "RayKind", "RayPath", "RaySpec", "Rect", "Route", "SingularityError", "SpatialRegimeInput",
    "VelocityRegimeInput", "VerificationError", "c_s1", "c_s3", "cancellation_identity", "envelope_j",
    "envelope_thm", "frac_pv", "gauss_2f1", "k_eval", "k_half", "k_half_error", "k_half_semi", "k_via_v_rep",
    "k_via_x_rep",
    "kolmogorov_gaussian", "mass", "p_direct", "p_eval", "phi", "q_cdf", "q_eval", "ratio_grid",
    "ray_gamma_identity", "ray_gamma_integral", "ray_limit", "split_check",
]
