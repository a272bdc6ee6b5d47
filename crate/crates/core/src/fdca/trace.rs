use crate::error::{Error, Result};
use crate::fdca::algebra::{AlgElem, MultiMatrix};
use crate::linalg::{real, CMat, CVec, C64};

/// A faithful tracial state `tr(x) = Σ_b t_b · Tr(x_b)`, where `t_b` is the
/// value on a minimal projection of block `b`.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceState {
    block_dims: Vec<usize>,
    weights: Vec<f64>,
}

impl TraceState {
    /// Normalization `Σ n_b t_b = 1` is enforced within `1e-9`.
    pub fn new(algebra: &MultiMatrix, weights: Vec<f64>) -> Result<Self> {
        let dims = algebra.block_dims();
        if weights.len() != dims.len() {
            return Err(Error::InvalidTrace(format!(
                "expected {} weights, got {}",
                dims.len(),
                weights.len()
            )));
        }
        if let Some(pos) = weights.iter().position(|&t| !(t > 0.0) || !t.is_finite()) {
            return Err(Error::InvalidTrace(format!("weights[{pos}] must be positive (faithful)")));
        }
        let total: f64 = dims.iter().zip(&weights).map(|(&n, &t)| n as f64 * t).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidTrace(format!("weights give tr(1) = {total}, expected 1")));
        }
        Ok(Self { block_dims: dims.to_vec(), weights })
    }

    /// Rescales positive weights into a state.
    pub fn normalized(algebra: &MultiMatrix, weights: Vec<f64>) -> Result<Self> {
        let total: f64 =
            algebra.block_dims().iter().zip(&weights).map(|(&n, &t)| n as f64 * t).sum();
        if !(total > 0.0) {
            return Err(Error::InvalidTrace("weights must be positive".into()));
        }
        Self::new(algebra, weights.iter().map(|t| t / total).collect())
    }

    /// The trace proportional to block dimension, `t_b = n_b / dim(A)`; this
    /// is the Markov trace of `ℂ ⊂ A`.
    pub fn dimension_proportional(algebra: &MultiMatrix) -> Self {
        let d = algebra.dim() as f64;
        Self {
            block_dims: algebra.block_dims().to_vec(),
            weights: algebra.block_dims().iter().map(|&n| n as f64 / d).collect(),
        }
    }

    /// Every block weighted equally per minimal projection (`t_b = 1/Σ n_b`);
    /// the normalized trace on `M_n` and the uniform state on `ℂ^n`.
    pub fn uniform(algebra: &MultiMatrix) -> Self {
        let total: usize = algebra.block_dims().iter().sum();
        Self {
            block_dims: algebra.block_dims().to_vec(),
            weights: vec![1.0 / total as f64; algebra.num_blocks()],
        }
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.block_dims
    }

    pub fn is_on(&self, algebra: &MultiMatrix) -> bool {
        self.block_dims == algebra.block_dims()
    }

    pub fn check_on(&self, algebra: &MultiMatrix) -> Result<()> {
        if self.is_on(algebra) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "trace lives on blocks {:?}, algebra has {:?}",
                self.block_dims,
                algebra.block_dims()
            )))
        }
    }

    pub fn eval(&self, x: &AlgElem) -> C64 {
        x.blocks.iter().zip(&self.weights).map(|(b, &t)| b.trace() * t).sum()
    }

    /// `⟨x, y⟩ = tr(x* y)`.
    pub fn inner(&self, x: &AlgElem, y: &AlgElem) -> C64 {
        self.eval(&(&x.adjoint() * y))
    }

    /// Per-coordinate weights of the trace inner product, which is diagonal in
    /// the matrix-unit basis.
    pub fn coordinate_weights(&self) -> Vec<f64> {
        self.block_dims
            .iter()
            .zip(&self.weights)
            .flat_map(|(&n, &t)| std::iter::repeat_n(t, n * n))
            .collect()
    }

    pub fn gram_matrix(&self) -> CMat {
        let w = self.coordinate_weights();
        CMat::from_diagonal(&CVec::from_iterator(w.len(), w.iter().map(|&t| real(t))))
    }

    pub fn max_weight_difference(&self, other: &TraceState) -> f64 {
        if self.block_dims != other.block_dims {
            return f64::INFINITY;
        }
        self.weights.iter().zip(&other.weights).fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}
