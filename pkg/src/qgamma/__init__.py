"""Gamma-family quantum relative entropies on finite-dimensional algebras."""

from .algebra import (
    AlgebraShape,
    HermitianElement,
    SpectralDecomposition,
    State,
    matrix_log_support,
    matrix_power,
    random_hermitian,
    random_state,
    spectral,
    support_projection,
    trace_distance,
    trace_pairing,
)
from .bregman import (
    FenchelEstimate,
    fenchel_dual_estimate,
    frechet_derivative,
    generalized_bregman,
    representation_index_duality_residual,
    standard_bregman,
    young_fenchel_residual,
)
from .channels import (
    AuditReport,
    Channel,
    ChannelSampler,
    apply_coarse_graining,
    apply_markov,
    duality_residual,
    identity_channel,
    monotonicity_audit,
    pinching_channel,
    random_channel,
    unitary_channel,
)
from .divergence import (
    classical_gamma_divergence,
    cosine_residual,
    divergence,
    gamma_divergence,
    hasegawa_divergence,
    relative_entropy_0,
    relative_entropy_1,
)
from .embeddings import (
    GammaVector,
    dualiser,
    ell_gamma,
    ell_gamma_inverse,
    pairing,
    psi_gamma,
    psi_gamma_gradient,
    schatten_norm,
)
from .errors import (
    GammaMismatch,
    GammaOutOfRange,
    Infeasible,
    LengthMismatch,
    MaxIterationsWarning,
    NonHermitian,
    NotPositive,
    QGammaError,
    SamplingFailed,
    ShapeMismatch,
)
from .projection import (
    ConstraintSet,
    ProjectionResult,
    bregman_project,
    optimality_residuals,
    pythagorean_residual,
)
from .quasientropy import f_gamma, quasi_entropy, quasi_entropy_gamma, relative_modular_data

__version__ = "0.1.0"
