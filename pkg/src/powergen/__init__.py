"""Zeros of the polynomials generated by ``(1 + B(z) t + A(z) t^3)^(-alpha)``."""

from .cubic import (
    CubicRoots,
    GeneralRootTriple,
    all_roots,
    discriminant,
    real_root_x,
    roots_from_theta,
    theta_from_z,
    z_of_theta,
)
from .integrals import (
    ArgSweep,
    Dominance,
    asymptotic_ratio,
    dominance_check,
    gamma_fn,
    hm_arg_sweep,
    integrand_A,
    integrand_B,
    integrand_g,
    integrate_A,
    integrate_B_direct,
    integrate_B_watson,
    reconstruct_Pm,
    upper_bound_A,
    winding_brackets,
)
from .polyparse import PolyParseError, format_poly, parse_poly
from .quadrature import IntegralResult, QuadratureSpec
from .series import (
    BivariateSeries,
    PolynomialZ,
    ScaledValue,
    SeriesParams,
    UnivariateCoeffs,
    binom_neg_alpha,
    derivative_identity_residual,
    eval_pm,
    eval_scaled,
    hm_coeffs,
    pm_coeffs,
    pm_coeffs_recurrence,
)
from .zeros import (
    CurveReport,
    DensityReport,
    RealRoots,
    RootSet,
    aberth_roots,
    curve_check_Hm,
    density_report,
    limiting_cdf,
    limiting_density,
    pm_real_roots,
)

__version__ = "0.1.0"
