#![allow(dead_code)]

use kackit::linalg::random_unitary;
use kackit::{AlgElem, InclusionMatrix, MultiMatrix, TraceState, UnitalEmbedding};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Block sizes of `B` and an inclusion matrix with no zero row or column.
pub fn inclusion_shape() -> impl Strategy<Value = (Vec<usize>, Vec<Vec<usize>>)> {
    (1..=2usize, 1..=3usize)
        .prop_flat_map(|(kb, ka)| {
            (prop::collection::vec(1..=2usize, kb), prop::collection::vec(prop::collection::vec(0..=2usize, kb), ka))
        })
        .prop_filter("every block is used", |(nb, rows)| {
            rows.iter().all(|r| r.iter().any(|&m| m > 0)) && (0..nb.len()).all(|j| rows.iter().any(|r| r[j] > 0))
        })
}

pub fn target_dims(nb: &[usize], rows: &[Vec<usize>]) -> Vec<usize> {
    rows.iter().map(|r| r.iter().zip(nb).map(|(m, n)| m * n).sum()).collect()
}

pub fn standard_embedding(nb: &[usize], rows: &[Vec<usize>]) -> UnitalEmbedding {
    let b = MultiMatrix::new(nb.to_vec()).unwrap();
    let a = MultiMatrix::new(target_dims(nb, rows)).unwrap();
    UnitalEmbedding::from_multiplicities(b, a, &InclusionMatrix::from_rows(rows).unwrap()).unwrap()
}

/// The standard embedding conjugated by a random unitary in each block.
pub fn twisted_embedding(nb: &[usize], rows: &[Vec<usize>], seed: u64) -> UnitalEmbedding {
    let emb = standard_embedding(nb, rows);
    let mut r = rng(seed);
    let us: Vec<_> = emb.target().block_dims().iter().map(|&n| random_unitary(&mut r, n)).collect();
    UnitalEmbedding::from_fn(
        emb.source().clone(),
        emb.target().clone(),
        |x| {
            let y = emb.apply(x);
            AlgElem::from_blocks(y.blocks.iter().zip(&us).map(|(b, u)| u * b * u.adjoint()).collect())
        },
        1e-9,
    )
    .unwrap()
}

pub fn random_trace(a: &MultiMatrix, seed: u64) -> TraceState {
    let mut r = rng(seed);
    TraceState::normalized(a, (0..a.num_blocks()).map(|_| r.random_range(0.2..1.0)).collect()).unwrap()
}
