"""Verification-grade numerics for elliptic kernel-function identities of
Inozemtsev-type Hamiltonians: theta q-series, many-body operators, named
constants, and contour-integral eigenfunction constructions."""

from .coupling import (
    CouplingData,
    coupling_cor1,
    coupling_cor2,
    coupling_cor3,
    coupling_cor4,
    coupling_pm,
)
from .elliptic import (
    LatticeConstants,
    LatticeParams,
    ThetaJet,
    eta1,
    lattice_constants,
    phi,
    phi_dx,
    theta,
    theta_dbeta,
    theta_dx,
    theta_jet,
    wp,
    zeta_w,
)
from .errors import (
    BranchStepTooLarge,
    DegenerateEigenfunction,
    EllkernError,
    InvalidContour,
    InvalidCoupling,
    InvalidLattice,
    MonodromyFailure,
    NearSingularity,
    NonConvergence,
    QuadratureNonConvergence,
    SamplingExhausted,
)
from .identities import IdentityId, ResidualReport, check_all, check_identity
from .operators import (
    ConstantKind,
    HamiltonianSpec,
    IdentityConstants,
    KernelParams,
    apply,
    build_deformed,
    build_generalized,
    build_inozemtsev,
    check_symmetries,
    combine,
    constants,
    corollary_coupling,
    residual_corollary,
    residual_source,
    source_energy,
    source_energy_unsimplified,
    sym_dual,
    sym_swap,
    w_assembly,
)
from .products import (
    NamedKind,
    ThetaFactor,
    ThetaProduct,
    beta_log,
    build_named,
    build_phi0,
    grad_log,
    hess_log_diag,
    log_value,
    value,
)
from .eigen import (
    BranchState,
    ContourKind,
    ContourSpec,
    LameSolution,
    PathIntegrand,
    bethe_integrand_product,
    example2_lambda,
    figure_eight_integral,
    gen_coeffs,
    lame_build,
    lame_f,
    residual_example1,
    residual_example2,
    theta_check,
    tilde_f_n,
)

__version__ = "0.1.0"
