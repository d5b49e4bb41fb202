use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("integration failed: {0}")]
    Integration(#[from] singmap::StepError),
    #[error("{0}")]
    MissingAtlas(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("atlas: {0}")]
    Atlas(#[from] singmap::AtlasError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Integration(_) => 3,
            CliError::MissingAtlas(_) => 4,
            CliError::Io(_) | CliError::Csv(_) | CliError::Atlas(_) | CliError::Json(_) => 1,
        }
    }
}
