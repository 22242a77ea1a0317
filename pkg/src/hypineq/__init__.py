"""Numerical verification of sharp Lorentz-Sobolev inequalities on hyperbolic space."""

from ._kernels import HAVE_NUMBA, NUMBA_DISABLED
from .constants import (
    LorentzIndex,
    frac_sobolev_constant,
    mt_exponent,
    poincare_constant,
    poincare_sobolev_constant,
    sobolev_constant_rn,
    sphere_area,
    truncated_exp,
    truncation_index,
    unit_ball_volume,
    weighted_mt_exponent,
)
from .geometry import (
    psi,
    psi_inverse,
    sinh_power_lower_gap,
    surface_factor,
    surface_ratio_volume,
)
from .profiles import (
    MonotoneProfile,
    RadialFunction,
    SampledFunction,
    decreasing_rearrangement,
    family_cone,
    family_exp,
    family_frac_extremal,
    family_frac_pullback,
    family_mt,
    family_power_cutoff,
    family_sharp,
    gradient_lorentz_norm,
    lorentz_norm,
    maximal_function,
    piecewise_linear_profile,
    profile_from_dict,
    profile_to_dict,
    radialize,
    rearrange_radial,
    v_transform,
)
from .quadrature import QuadratureConfig, QuadratureResult, integrate, integrate_piecewise, log_grid
from .verifiers import (
    BATTERY_SUITES,
    SweepResult,
    VerificationReport,
    mt_functional,
    mt_lambda_sweep,
    run_battery,
    sharpness_sweep_poincare,
    verify_abreu_scaling,
    verify_convexity_ineq,
    verify_frac_sobolev,
    verify_hardy_1d,
    verify_key_estimate,
    verify_maximal,
    verify_mt,
    verify_poincare,
    verify_poincare_sobolev,
    verify_pointwise_headbound,
)

__version__ = "0.1.0"

__all__ = [
    "HAVE_NUMBA",
    "NUMBA_DISABLED",
    "LorentzIndex",
    "frac_sobolev_constant",
    "mt_exponent",
    "poincare_constant",
    "poincare_sobolev_constant",
    "sobolev_constant_rn",
    "sphere_area",
    "truncated_exp",
    "truncation_index",
    "unit_ball_volume",
    "weighted_mt_exponent",
    "psi",
    "psi_inverse",
    "sinh_power_lower_gap",
    "surface_factor",
    "surface_ratio_volume",
    "MonotoneProfile",
    "RadialFunction",
    "SampledFunction",
    "decreasing_rearrangement",
    "family_cone",
    "family_exp",
    "family_frac_extremal",
    "family_frac_pullback",
    "family_mt",
    "family_power_cutoff",
    "family_sharp",
    "gradient_lorentz_norm",
    "lorentz_norm",
    "maximal_function",
    "piecewise_linear_profile",
    "profile_from_dict",
    "profile_to_dict",
    "radialize",
    "rearrange_radial",
    "v_transform",
    "QuadratureConfig",
    "QuadratureResult",
    "integrate",
    "integrate_piecewise",
    "log_grid",
    "BATTERY_SUITES",
    "SweepResult",
    "VerificationReport",
    "mt_functional",
    "mt_lambda_sweep",
    "run_battery",
    "sharpness_sweep_poincare",
    "verify_abreu_scaling",
    "verify_convexity_ineq",
    "verify_frac_sobolev",
    "verify_hardy_1d",
    "verify_key_estimate",
    "verify_maximal",
    "verify_mt",
    "verify_poincare",
    "verify_poincare_sobolev",
    "verify_pointwise_headbound",
    "__version__",
]
