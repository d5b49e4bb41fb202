//! Complex-path Taylor series integration with primary-singularity location.
//!
//! The solution of `y' = f(t, y)` is continued along piecewise-linear routes
//! in the complex t-plane. At every step the tail of the local Taylor series
//! is fitted to `(a - t)^(-s)` to estimate the nearest singularity, and
//! accepted estimates accumulate in an [`Atlas`].

pub mod atlas;
pub mod complex_pair;
pub mod error;
pub mod integrator;
pub mod locator;
pub mod paths;
pub mod taylor;

pub use atlas::{run_campaign, Atlas, AuditReport, Campaign, CampaignRun, IngestSummary, ProblemSpec};
pub use error::{AtlasError, OptionsError, PathError, SeriesError, StepError};
pub use integrator::{
    integrate_path, integrate_segment, step_size, IntegrationFailure, IntegrationOptions, PathSolution, PathSpec,
    StepRecord,
};
pub use locator::{
    fit_primary_singularity, merge_estimates, Singularity, SingularityEstimate, DEFAULT_ACCEPT_THRESHOLD,
    DEFAULT_MERGE_TOL, DEFAULT_WINDOW,
};
pub use paths::{
    circle_loop, closed_loop_check, excursion, long_jump_path, pole_vault_path, LoopCheck, Side, VaultSpec,
};
pub use taylor::{generate_solution_series, ComplexScalar, OdeSystem, PainleveI, TruncatedSeries};
