use thiserror::Error;

#[derive(Debug, Error)]
pub enum OftError {
    #[error("index {index} out of range for axis {axis} (extent {extent})")]
    Range { axis: usize, index: usize, extent: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("degenerate step ratio: dtT ({dt_t}) must exceed dt0 ({dt0})")]
    DegenerateRatio { dt0: f64, dt_t: f64 },

    #[error("singular tridiagonal line on axis {axis}, line {line} (pivot row {row})")]
    SingularLine { axis: usize, line: usize, row: usize },

    #[error("invalid state: {0}")]
    State(String),

    #[error("non-finite value produced by {0}")]
    NonFinite(&'static str),

    #[error("Newton iteration for eigenvalue seed {n} did not converge")]
    SeedFailure { n: usize },

    #[error("eigenvalue enumeration incomplete: found {found} roots, winding number {expected}")]
    Incomplete { found: usize, expected: i64 },

    #[error("contour passes too close to a root: {0}")]
    ContourNearRoot(String),

    #[error("modal multiplier resonance at mode {mode:?} (|1 - lambda^2/kappa^2| = {magnitude:e})")]
    Resonance { mode: Vec<usize>, magnitude: f64 },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = OftError> = std::result::Result<T, E>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(OftError::Argument(msg.into()))
}
