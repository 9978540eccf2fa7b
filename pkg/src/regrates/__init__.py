"""Convergence rates of spectral regularization methods through interpolation norms.

Elements of a Hilbert space are represented by their discrete spectral
measure with respect to ``T*T``. The package evaluates Hilbert-scale,
interpolation and tail norms, distance functions, Tikhonov and Landweber rate
functionals and their noisy counterparts.
"""
from .builtin import ExampleId, build, bvp_sign, diag_example, dirac, powerlaw
from .checks import Check, Report, VerificationError
from .distance import conjugate_equivalence_check, d_e_identity, distance, distance_profile
from .interp import (
    hilbert_norm,
    interp_norm,
    k_functional,
    n_theta,
    sandwich_report,
    triple_norm,
    variational_sup,
)
from .noisy import (
    apriori_alpha,
    discrepancy_stop,
    make_noise,
    optimal_alpha,
    quasiopt_ratio,
    rate_exponent_fit,
)
from .rates import (
    c1_constant,
    c2_constant,
    delta_rate,
    landweber_normalized,
    log_gamma,
    tikhonov_error,
    tikhonov_rate,
)
from .regularizers import FilterSpec, NoisyData, error_factor, regularization_error
from .spectral import (
    DiscreteSpectralMeasure,
    SpectralElement,
    SpectralProblem,
    measure_from_atoms,
)

__version__ = "0.1.0"

__all__ = [
    "Check",
    "DiscreteSpectralMeasure",
    "ExampleId",
    "FilterSpec",
    "NoisyData",
    "Report",
    "SpectralElement",
    "SpectralProblem",
    "VerificationError",
    "apriori_alpha",
    "build",
    "bvp_sign",
    "c1_constant",
    "c2_constant",
    "conjugate_equivalence_check",
    "d_e_identity",
    "delta_rate",
    "diag_example",
    "dirac",
    "discrepancy_stop",
    "distance",
    "distance_profile",
    "error_factor",
    "hilbert_norm",
    "interp_norm",
    "k_functional",
    "landweber_normalized",
    "log_gamma",
    "make_noise",
    "measure_from_atoms",
    "n_theta",
    "optimal_alpha",
    "powerlaw",
    "quasiopt_ratio",
    "rate_exponent_fit",
    "regularization_error",
    "sandwich_report",
    "tikhonov_error",
    "tikhonov_rate",
    "triple_norm",
    "variational_sup",
]
