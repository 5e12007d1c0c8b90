use thiserror::Error;

#[derive(Debug, Error)]
pub enum EitError {
    /// Malformed or inconsistent input (shapes, indices, parse failures).
    #[error("invalid input: {0}")]
    Input(String),
    /// Geometric admissibility of the inclusions is violated.
    #[error("admissibility violation: {0}")]
    Admissibility(String),
    /// Two regions claim the same element.
    #[error("region conflict at element {element}: regions {first} and {second}")]
    RegionConflict { element: usize, first: u32, second: u32 },
    /// A configuration value lies outside its legal range.
    #[error("configuration error: {0}")]
    Config(String),
    /// Configuration the implementation does not cover.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    /// Parameter outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Linear solve failed (singular system, residual too large).
    #[error("solver error: {0}")]
    Solver(String),
    /// Problem size exceeds the configured budget.
    #[error("resource limit: {0}")]
    Resource(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = EitError> = std::result::Result<T, E>;
