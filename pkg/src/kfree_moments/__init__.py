"""Exponential sums over k-free numbers and their L^p moments."""

__version__ = "0.1.0"

from .arith import (
    BandSpec,
    CapacityError,
    KFreeTable,
    MobiusTable,
    band_value,
    compute_cr,
    count_kfree,
    sieve_kfree,
    sieve_mobius,
    totient,
    window_band_energy,
)
from .decomp import (
    DecompositionPlan,
    build_band_coefficients,
    build_star_coefficients,
    choose_plan,
    lemma1_sweep,
    piece_moments,
    verify_decomposition,
)
from .expsum import (
    CoeffSeq,
    SpectrumGrid,
    eval_direct,
    eval_grid,
    fejer,
    kernel_congruence,
    kernel_nk,
    kfree_sequence,
)
from .quad import (
    MomentResult,
    QuadratureBudgetError,
    holder_check,
    moment_from_grid,
    moment_with_refinement,
    moments_with_refinement,
    parseval_check,
)
from .scaling import (
    ExponentFit,
    critical_ratio,
    e_curve,
    fit_exponent,
    major_arc_scan,
    moment_sweep,
    theoretical_e,
    totient_sum_check,
)
