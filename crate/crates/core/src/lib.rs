//! Finite-dimensional C*-algebra inclusions, Pimsner–Popa bases, commuting
//! squares, weak Kac algebras and their crossed products.
//!
//! Algebras are multi-matrix algebras `⊕ M_{n_i}` with complex
//! floating-point entries. Abstract *-algebras (duals, crossed products) are
//! carried as structure constants and identified with multi-matrix form by a
//! numerical Wedderburn decomposition.

pub mod bases;
pub mod commsq;
pub mod crossprod;
pub mod error;
pub mod fdca;
pub mod linalg;
pub mod wha;

pub use error::{Error, Result};
pub use fdca::{
    AlgElem, BasicConstructionData, ConditionalExpectation, InclusionMatrix, MultiMatrix,
    StarAlgebraPresentation, TraceState, UnitalEmbedding,
};
pub use linalg::{CMat, CVec, C64, DEFAULT_TOL};
