use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series expansion points differ: {left} vs {right}")]
    ExpansionPointMismatch { left: Complex64, right: Complex64 },
    #[error("series orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },
    #[error("series order {0} is too low")]
    OrderTooLow(usize),
    #[error("system has {expected} components but {got} initial values were given")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite Taylor coefficient {coefficient} in component {component}")]
    Overflow { component: usize, coefficient: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OptionsError {
    #[error("safety factor must lie in (0, 1), got {0}")]
    Safety(f64),
    #[error("{name} must be positive and finite, got {value}")]
    NonPositive { name: &'static str, value: f64 },
    #[error("series order {order} must be at least window + 2 = {}", window + 2)]
    OrderBelowWindow { order: usize, window: usize },
    #[error("window must be at least 2, got {0}")]
    Window(usize),
    #[error("max_steps must be at least 1")]
    MaxSteps,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("a path needs at least two vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex {0} is not finite")]
    NonFinite(usize),
    #[error("vertex {0} repeats the following vertex")]
    RepeatedVertex(usize),
    #[error("a closed loop must end where it starts")]
    NotClosed,
    #[error("vaults over poles at {left} and {right} overlap for radius {radius}")]
    OverlappingVaults { left: f64, right: f64, radius: f64 },
    #[error("pole at {pole} lies outside (0, {target})")]
    PoleOutOfRange { pole: f64, target: f64 },
    #[error("invalid path parameter: {0}")]
    Parameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("step size {h:e} fell below the minimum {min_step:e} at t = {t}")]
    BelowMinStep { h: f64, min_step: f64, t: Complex64 },
    #[error("Taylor expansion failed at t = {t}: {source}")]
    Series {
        t: Complex64,
        #[source]
        source: SeriesError,
    },
    #[error("non-finite state after step to t = {t}")]
    NonFiniteState { t: Complex64 },
    #[error("exceeded {0} steps")]
    MaxSteps(usize),
    #[error(transparent)]
    Options(#[from] OptionsError),
    #[error(transparent)]
    Path(#[from] PathError),
}

#[derive(Debug, Error)]
pub enum AtlasError {
    #[error("campaign id {0:?} is already present in the atlas")]
    DuplicateCampaign(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}
