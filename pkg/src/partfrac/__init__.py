"""partfrac: partial-fraction coefficients of the restricted partition
generating function, the dilogarithm zeros and saddle points that govern
their growth, and full asymptotic expansions of the Farey-subset sums."""

from .numkit import (
    DEFAULT_PREC,
    NumericError,
    Rat,
    TruncSeries,
    set_precision,
    bernoulli_number,
    bernoulli_poly,
    binomial_general,
    partial_ordinary_bell,
    shift_series_basis,
    stirling_subset,
    taylor_coeffs,
)
from .specfun import DilogZero, clausen, clausen_max, cot_deriv, dilog, dilog_continued, dilog_zero, rho_deriv
from .sineprod import (
    MinPair,
    half_identities,
    log_product_estimate,
    min_pair,
    psi,
    psi_recip,
    s_sum,
    sine_product,
    sine_product_em,
    sine_product_recip,
)
from .rademacher import (
    FareyFrac,
    QValue,
    c01_formula,
    c_coeff,
    ek_table,
    farey_fractions,
    partition_count,
    q_bound,
    q_bound_refined,
    q_contour,
    q_double,
    q_exact,
    q_simple,
    q_value,
    reconstruct_from_pf,
    subset_fractions,
    subset_sum,
    xi_triple,
    zero_sum,
)
from .saddle import (
    PathSpec,
    SaddleContext,
    build_path,
    p_d,
    p_d_prime,
    p_d_second,
    ray_deriv_bounds,
    ray_deriv_value,
    saddle_point,
    steepest_expansion,
    verify_path,
    wojdylo_a2s,
)
from .expansions import (
    ExpansionResult,
    b0_constant,
    coeff_table,
    compare,
    eval_expansion,
    expansion_for,
    g_kernels,
    phi_direct,
    phi_series,
    prefactor,
    u_coeffs,
)

__version__ = "0.1.0"
