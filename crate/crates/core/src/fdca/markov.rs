use crate::error::{Error, Result};
use crate::fdca::algebra::MultiMatrix;
use crate::fdca::embedding::{InclusionMatrix, UnitalEmbedding};
use crate::fdca::trace::TraceState;

/// Markov trace of an inclusion `B ⊂ A` together with its restriction to `B`.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkovTrace {
    /// Weights on the blocks of `A`.
    pub weights: Vec<f64>,
    /// Weights of the restricted trace on the blocks of `B`.
    pub source_weights: Vec<f64>,
    /// `‖Λ‖²`.
    pub beta: f64,
    /// `‖ΛΛᵗ t − β t‖_∞`.
    pub residual: f64,
}

impl MarkovTrace {
    pub fn trace_on(&self, algebra: &MultiMatrix) -> Result<TraceState> {
        TraceState::normalized(algebra, self.weights.clone())
    }
}

/// Perron–Frobenius vector of `ΛΛᵗ` normalized so that `Σ n_i t_i = 1` where
/// `n = Λ · source_dims` are the block sizes of the larger algebra.
pub fn markov_trace(lambda: &InclusionMatrix, source_dims: &[usize]) -> Result<MarkovTrace> {
    if source_dims.len() != lambda.ncols() {
        return Err(Error::ShapeMismatch(format!(
            "inclusion matrix has {} columns but {} source blocks were given",
            lambda.ncols(),
            source_dims.len()
        )));
    }
    if !lambda.is_connected() {
        return Err(Error::DisconnectedInclusion(format!("Bratteli graph of {lambda} is disconnected")));
    }
    let m = lambda.to_f64();
    let g = &m * m.transpose();
    let eig = g.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let beta = eig.eigenvalues[order[0]];
    if order.len() > 1 && (beta - eig.eigenvalues[order[1]]).abs() <= 1e-9 * beta.max(1.0) {
        return Err(Error::DisconnectedInclusion("Perron eigenvalue is degenerate".into()));
    }
    let v = eig.eigenvectors.column(order[0]);
    let sign = if v.sum() < 0.0 { -1.0 } else { 1.0 };
    let sizes: Vec<f64> = (0..lambda.nrows())
        .map(|i| (0..lambda.ncols()).map(|j| (lambda.get(i, j) * source_dims[j]) as f64).sum())
        .collect();
    let total: f64 = sizes.iter().zip(v.iter()).map(|(n, x)| n * x * sign).sum();
    let mut weights: Vec<f64> = v.iter().map(|x| x * sign / total).collect();
    // polish with power steps on the integer matrix
    for _ in 0..3 {
        let next = &g * nalgebra::DVector::from_vec(weights.clone());
        let norm: f64 = sizes.iter().zip(next.iter()).map(|(n, x)| n * x).sum();
        weights = next.iter().map(|x| x / norm).collect();
    }
    if weights.iter().any(|&t| t <= 0.0) {
        return Err(Error::DisconnectedInclusion("Perron vector is not strictly positive".into()));
    }
    let tv = nalgebra::DVector::from_vec(weights.clone());
    let residual = (&g * &tv - &tv * beta).amax();
    let source_weights = (m.transpose() * &tv).iter().copied().collect();
    Ok(MarkovTrace { weights, source_weights, beta, residual })
}

/// Markov trace of the inclusion described by an embedding.
pub fn markov_trace_for(emb: &UnitalEmbedding) -> Result<MarkovTrace> {
    markov_trace(emb.inclusion_matrix(), emb.source().block_dims())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutative_inclusion_is_uniform() {
        for n in 1..=6 {
            let lambda = InclusionMatrix::column(&vec![1; n]).unwrap();
            let mt = markov_trace(&lambda, &[1]).unwrap();
            assert!((mt.beta - n as f64).abs() < 1e-12);
            for t in mt.weights {
                assert!((t - 1.0 / n as f64).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn m2_plus_c() {
        let mt = markov_trace(&InclusionMatrix::column(&[2, 1]).unwrap(), &[1]).unwrap();
        assert!((mt.weights[0] - 0.4).abs() < 1e-12);
        assert!((mt.weights[1] - 0.2).abs() < 1e-12);
        assert!((mt.beta - 5.0).abs() < 1e-12);
        assert!((mt.source_weights[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disconnected_is_rejected() {
        let lambda = InclusionMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap();
        assert!(matches!(markov_trace(&lambda, &[1, 1]), Err(Error::DisconnectedInclusion(_))));
    }
}
