"""Ground states and critical dynamics for coupled nonlinear Schrodinger systems."""

from .amplitudes import (
    AmplitudeSolution,
    EmptyCandidatesError,
    FRootReport,
    InvalidPartitionError,
    RegimeViolationError,
    SelectionResult,
    SmallBetaPrediction,
    analyze_f_roots,
    enumerate_supports,
    oracle_symmetric,
    select_minimal,
    small_beta_regime,
    solve_all_supports,
    solve_on_support,
)
from .coupling import (
    AsymmetricInputError,
    CouplingMatrix,
    NonFiniteInputError,
    PartitionStructure,
    check_p1,
    detect_partition,
    new_coupling,
)
from .evolution import (
    EvolutionResult,
    EvolveConfig,
    FieldState,
    Grid,
    NonFiniteFieldError,
    NotABlowupRunError,
    VERDICT_BLOWUP,
    VERDICT_GLOBAL,
    VERDICT_INCONCLUSIVE,
    component_masses,
    concentration_monitor,
    diagnostics,
    gaussian_field,
    read_snapshot,
    rescale_mass,
    rescaled_profile_distance,
    run_dichotomy,
    soliton_field,
    step,
    write_snapshot,
)
from .ground_state import (
    EmptySelectionError,
    GnSampleReport,
    GroundState,
    NotCriticalError,
    assemble,
    critical_mass,
    functional_i,
    gn_constant,
    pde_residual,
    sample_gn_inequality,
)
from .scalar_profile import (
    NoConvergenceError,
    PetviashviliResult,
    ProfileConfig,
    ScalarProfile,
    SupercriticalExponentError,
    closed_form_1d,
    petviashvili_profile,
    profile_integrals,
    profile_interpolant,
    solve_profile,
)

__version__ = "0.1.0"
