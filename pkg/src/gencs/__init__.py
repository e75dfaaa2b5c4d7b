"""Recovery of signals from noisy compressive measurements under an
expansive ReLU generative prior, by explicit (sub)gradient descent on the
empirical risk, together with the matching expected-landscape formulas,
sampled isometry/weight-distribution diagnostics, and a seeded Monte
Carlo experiment harness.
"""

from .conditions import (
    ConditionReport,
    DegenerateSamplesError,
    rric_deviation,
    wdc_deviation,
)
from .experiments import (
    ExperimentConfig,
    NegationEscapeReport,
    SweepTable,
    TrialResult,
    convergence_trace,
    make_problem,
    negation_escape_test,
    noise_error_sweep,
    success_sweep,
    trial_seed,
)
from .generator import (
    ActivationPattern,
    GeneratorNetwork,
    active_product,
    forward,
    masked_weights,
)
from .landscape import (
    LandscapeEval,
    RhoTable,
    expected_risk,
    g_theta,
    h_direction,
    landscape_eval,
    q_matrix,
    rho,
    rho_table,
    theta_sequence,
)
from .numerics import (
    SpectralNormError,
    gaussian_matrix,
    gaussian_vector,
    make_rng,
    spectral_norm,
    substream,
)
from .risk import (
    RecoveryProblem,
    finite_difference_gradient,
    risk_value,
    step_direction,
)
from .solver import (
    DivergedError,
    IterateTrace,
    SolveResult,
    SolverConfig,
    default_step_size,
    solve,
)

__version__ = "0.1.0"

__all__ = [
    "ActivationPattern",
    "ConditionReport",
    "DegenerateSamplesError",
    "DivergedError",
    "ExperimentConfig",
    "GeneratorNetwork",
    "IterateTrace",
    "LandscapeEval",
    "NegationEscapeReport",
    "RecoveryProblem",
    "RhoTable",
    "SolveResult",
    "SolverConfig",
    "SpectralNormError",
    "SweepTable",
    "TrialResult",
    "active_product",
    "convergence_trace",
    "default_step_size",
    "expected_risk",
    "finite_difference_gradient",
    "forward",
    "g_theta",
    "gaussian_matrix",
    "gaussian_vector",
    "h_direction",
    "landscape_eval",
    "make_problem",
    "make_rng",
    "masked_weights",
    "negation_escape_test",
    "noise_error_sweep",
    "q_matrix",
    "rho",
    "rho_table",
    "risk_value",
    "rric_deviation",
    "solve",
    "spectral_norm",
    "step_direction",
    "substream",
    "success_sweep",
    "theta_sequence",
    "trial_seed",
    "wdc_deviation",
]
