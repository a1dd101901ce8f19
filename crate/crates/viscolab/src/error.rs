use thiserror::Error;

/// Errors reported by solvers and field reconstructions.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid grid size, field length, or parameter value.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A field that must be a gradient (curl-free) is not, or paired data
    /// violate a compatibility identity beyond the stated tolerance.
    #[error("incompatible data: {0}")]
    Incompatible(String),

    /// A boundary trace that must integrate to zero around the circle does
    /// not; the requested potential would be multivalued.
    #[error("multivalued potential: circulation {circulation:.3e} exceeds tolerance {tol:.3e}")]
    Multivalued { circulation: f64, tol: f64 },

    /// A linear or nonlinear solve failed (singular system, stalled or
    /// diverging iteration).
    #[error("solver failure: {0}")]
    Solver(String),

    /// Dataset or file content could not be parsed.
    #[error("malformed data: {0}")]
    Malformed(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
