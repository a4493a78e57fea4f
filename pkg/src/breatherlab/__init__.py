"""breatherlab: doubly-periodic nonlinear Klein-Gordon waves and their quanta.

Standing waves by the Poincare-Lindstedt expansion, traveling waves as
Jacobi elliptic profiles, symplectic field/polaron evolution with
conservation diagnostics, Floquet and zero-mode analysis about classical
backgrounds, and conditional density matrices for bipartite quantum
bookkeeping.
"""
from ._kernels import BACKEND_NAME as kernel_backend
from .dynamics import (
    DIRICHLET,
    PERIODIC,
    ConservedQuantities,
    FieldState,
    PolaronState,
    energy,
    evolve,
    evolve_with_diagnostics,
    momentum,
    state_from_profile,
    state_from_solution,
    step_kg,
    step_polaron,
)
from .elliptic import (
    TravelingWaveProfile,
    elliptic_K,
    fit_periodic_wave,
    jacobi_cn_sn_dn,
    ode_residual,
    profile_eval,
)
from .errors import (
    BreatherLabError,
    DimensionMismatchError,
    DomainError,
    LightConeError,
    NonConvergenceError,
    NoPeriodicOrbitError,
    NumericalError,
    ResonantSourceError,
    SingularJacobianError,
    SmallDivisorError,
    StabilityError,
    ValidationError,
    ZeroProbabilityError,
)
from .fluctuation import (
    Background,
    FloquetReport,
    HamiltonianExpansion,
    h_minus1_residual,
    hamiltonian_expansion,
    linearized_apply,
    monodromy,
    zero_mode_residual,
)
from .lindstedt import (
    LindstedtSolution,
    ResonanceProblem,
    build_nonresonant_solution,
    build_solution,
    first_order_rhs,
    pde_residual,
    resonance_residual,
    solve_resonance_system,
)
from .qcond import (
    BipartiteDims,
    DensityMatrix,
    Projector,
    conditional_density,
    conditional_density_raw,
    conditional_expectation,
    conditional_probability,
    is_projector,
    partial_trace,
    validate,
)
from .series import (
    LinearSpectrum,
    SineSeries2D,
    cube_project,
    dalembert_apply,
    eval_series,
    invert_dalembert,
)

__version__ = "0.1.0"
