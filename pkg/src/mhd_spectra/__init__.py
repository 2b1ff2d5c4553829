"""Linear stability spectra of magnetohydrostatic steady states under gravity."""

from .estimator import SpectrumEstimator
from .exceptions import (
    BlowUpError,
    CaseError,
    ConfigError,
    DefinitenessError,
    DomainError,
    DominanceError,
    MHDSpectraError,
    ModeError,
    SizeError,
    UnsupportedCaseError,
)
from .modes import (
    Field2D,
    NormalMode,
    escape_time,
    mode_field,
    select_dominant,
    vector_identity_residual,
)
from .operators import Case, ModeProblem, assemble, assemble_limit, quadratic_form, rayleigh_quotient
from .profiles import Grid, Profile, ProfileSpec, build_grid, make_profile, validate_steady_state
from .spectra import (
    CriterionReport,
    Spectrum,
    capital_lambda,
    instability_criterion,
    limit_check,
    solve_pencil,
    solve_principal,
    spectrum_over_k,
)
from .symmetrize import PointContext, State7, check_norm_equivalence, flux_jacobians, lower_order, symmetrizer
from .timedomain import GrowthFit, SimState, cfl_dt, fit_growth_rate, initial_data, simulate, step_leapfrog
