use thiserror::Error;

/// Errors raised by constructors and operations across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("invalid trace: {0}")]
    InvalidTrace(String),
    #[error("map is not a homomorphism (residual {residual:.3e})")]
    NotAHomomorphism { residual: f64 },
    #[error("map is not unital (residual {residual:.3e})")]
    NotUnital { residual: f64 },
    #[error("map is not *-preserving (residual {residual:.3e})")]
    NotStarPreserving { residual: f64 },
    #[error("map is not injective (rank {rank} < {expected})")]
    NotInjective { rank: usize, expected: usize },
    #[error("inclusion is disconnected: {0}")]
    DisconnectedInclusion(String),
    #[error("Gram matrix of the subalgebra basis is numerically singular")]
    SingularGram,
    #[error("algebra is not semisimple: trace form is singular")]
    NotSemisimple,
    #[error("numerical degeneracy: {0}")]
    NumericalDegeneracy(String),
    #[error("subspace is not a *-subalgebra (residual {residual:.3e})")]
    NotASubalgebra { residual: f64 },
    #[error("matrix is not flat: entry moduli deviate from 1/sqrt(n) by {deviation:.3e}")]
    NotFlat { deviation: f64 },
    #[error("matrix is not unitary (residual {residual:.3e})")]
    NotUnitary { residual: f64 },
    #[error("unsupported algebra shape: {0}")]
    UnsupportedAlgebraShape(String),
    #[error("input is not a unitary orthonormal basis: {0}")]
    NotUnitaryOnb(String),
    #[error("trace is not the Markov trace (tau * n = {tau_n:.6})")]
    NonMarkovTrace { tau_n: f64 },
    #[error("incompatible tower: {0}")]
    IncompatibleTower(String),
    #[error("invalid commuting square: {0}")]
    InvalidSquare(String),
    #[error("square is not a commuting square (residual {residual:.3e})")]
    NotCommutingSquare { residual: f64 },
    #[error("square is degenerate: {0}")]
    DegenerateSquare(String),
    #[error("input is not a right basis (residual {residual:.3e})")]
    InputNotBasis { residual: f64 },
    #[error("transferred family failed verification (residual {residual:.3e})")]
    TransferFailed { residual: f64 },
    #[error("invalid groupoid: {0}")]
    InvalidGroupoid(String),
    #[error("invalid weak Hopf structure: {0}")]
    InvalidStructure(String),
    #[error("action failed verification: {0}")]
    ActionNotVerified(String),
    #[error("rank of the quotient relation is tolerance-ambiguous (singular value {value:.3e})")]
    QuotientRankInstability { value: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
