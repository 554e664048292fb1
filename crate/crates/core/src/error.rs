use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Fock space: {0}")]
    InvalidSpace(&'static str),

    #[error("mode index {mode} out of range for {num_modes} modes")]
    ModeOutOfRange { mode: usize, num_modes: usize },

    #[error("operators belong to different Fock spaces")]
    SpaceMismatch,

    #[error("matrix is {rows}x{cols} but the space has dimension {dim}")]
    ShapeMismatch { rows: usize, cols: usize, dim: usize },

    #[error("{0} requires exactly two modes")]
    TwoModesRequired(&'static str),

    #[error("invalid Hamiltonian spec: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite matrix entries after {0}")]
    NonFinite(&'static str),

    #[error("operator is not unitary (max deviation {residual:.3e})")]
    NotUnitary { residual: f64 },

    #[error("singular point: {0}")]
    Singular(String),

    #[error("bracket [{lo}, {hi}] does not straddle the classification boundary")]
    NonBracketing { lo: f64, hi: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("cannot classify a zero vector")]
    ZeroVector,

    #[error("invalid sweep config at `{path}`: {message}")]
    InvalidConfig { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Config error tagged with the offending field path.
    pub fn config(path: &str, message: impl Into<String>) -> Self {
        Error::InvalidConfig { path: path.to_string(), message: message.into() }
    }
}
