//! Multi-matrix algebras, traces, embeddings and the constructions built on
//! them.

mod algebra;
mod basic;
mod commutant;
mod embedding;
mod expectation;
mod index;
mod markov;
mod presentation;
mod trace;
mod wedderburn;

pub use algebra::{AlgElem, MultiMatrix};
pub use basic::{
    basic_construction, is_basic_construction_triple, restrict_trace, BasicConstructionData, TripleReport,
};
pub use commutant::{relative_commutant, Subalgebra};
pub use embedding::{InclusionMatrix, UnitalEmbedding};
pub use expectation::ConditionalExpectation;
pub use index::{
    consistency_check, depth_from_tower, index_formula, watatani_index, ConsistencyReport, Depth,
    WatataniIndex,
};
pub use markov::{markov_trace, markov_trace_for, MarkovTrace};
pub use presentation::StarAlgebraPresentation;
pub use trace::TraceState;
pub use wedderburn::{wedderburn, Wedderburn};
