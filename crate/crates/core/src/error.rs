//! Error type shared by all modules of the crate.

use crate::decomp::DecompositionResult;

/// Crate-wide error enum. Numerical routines return these rather than
/// panicking so that the CLI can map them to exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix has a non-finite entry")]
    NonFinite,

    #[error("dimension mismatch: {0}")]
    Dim(String),

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not hermitian (relative asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e} of scale {1:.3e})")]
    NotPsd(f64, f64),

    #[error("eigensolver did not converge within {0} sweeps")]
    NoConvergence(usize),

    #[error("empty operator sequence")]
    EmptySequence,

    #[error("Rademacher enumeration cap exceeded: N = {n} > {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("problem size cap exceeded: {size} > {cap} total columns")]
    SizeCapExceeded { size: usize, cap: usize },

    #[error(
        "solver hit the iteration cap ({iterations} iterations, gap {gap:.3e}); \
         partial result attached",
        iterations = .0.iterations,
        gap = .0.gap
    )]
    MaxIterExceeded(Box<DecompositionResult>),

    #[error("projection does not commute with the stack modulus (commutator {0:.3e})")]
    NotCommuting(f64),

    #[error("ker b is not contained in ker a (residual mass {0:.3e}); the contraction limit degenerates")]
    KernelMismatch(f64),

    #[error("majorization violated at prefix {index}: partial sum deficit {deficit:.3e}")]
    MajorizationViolated { index: usize, deficit: f64 },

    #[error("no bracketing eigenvalue pair for target diagonal entry {target:.6e}")]
    NumericalBreakdown { target: f64 },

    #[error("degenerate support: both factors vanish but the input does not")]
    DegenerateSupport,

    #[error("invalid parameter: {0}")]
    InvalidParam(String),
}

pub type Result<T> = std::result::Result<T, Error>;
