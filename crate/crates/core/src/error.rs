use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("InvalidInput: {0}")]
    InvalidInput(String),

    #[error("NotFullDimensional: affine hull has dimension {affine_dim}, expected {dim}")]
    NotFullDimensional { dim: usize, affine_dim: usize },

    #[error("RedundantVertex: vertex {index} {coords:?} is not an extreme point")]
    RedundantVertex { index: usize, coords: Vec<i64> },

    #[error("NonIntegerVertex: vertex {index} has a non-integer coordinate")]
    NonIntegerVertex { index: usize },

    #[error("SizeLimit: {candidates} candidate points exceed the cap of {cap}")]
    SizeLimit { candidates: u128, cap: u128 },

    #[error("InternalInconsistency: {0}")]
    InternalInconsistency(String),

    #[error("NotFound: no fringe window up to r_max = {r_max}")]
    NotFound { r_max: u32 },

    #[error("NotLps: polytope is not locally point symmetric")]
    NotLps,

    #[error("WindowOverlap: {0}")]
    WindowOverlap(String),

    #[error("NoUniqueDiffEdge: {0}")]
    NoUniqueDiffEdge(String),

    #[error("IncompatibleFringe: {0}")]
    IncompatibleFringe(String),

    #[error("TooLarge: |L(nP)| = {points} exceeds the cap of {cap}")]
    TooLarge { points: usize, cap: usize },

    #[error("EmptySet: operation undefined on the empty set")]
    EmptySet,
}

impl Error {
    /// Short machine-readable name, as printed by the CLI.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidInput(_) => "InvalidInput",
            Error::NotFullDimensional { .. } => "NotFullDimensional",
            Error::RedundantVertex { .. } => "RedundantVertex",
            Error::NonIntegerVertex { .. } => "NonIntegerVertex",
            Error::SizeLimit { .. } => "SizeLimit",
            Error::InternalInconsistency(_) => "InternalInconsistency",
            Error::NotFound { .. } => "NotFound",
            Error::NotLps => "NotLps",
            Error::WindowOverlap(_) => "WindowOverlap",
            Error::NoUniqueDiffEdge(_) => "NoUniqueDiffEdge",
            Error::IncompatibleFringe(_) => "IncompatibleFringe",
            Error::TooLarge { .. } => "TooLarge",
            Error::EmptySet => "EmptySet",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
