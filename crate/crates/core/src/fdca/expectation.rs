use crate::error::{Error, Result};
use crate::fdca::algebra::{AlgElem, MultiMatrix};
use crate::fdca::embedding::UnitalEmbedding;
use crate::fdca::trace::TraceState;
use crate::linalg::{CMat, DEFAULT_TOL};

/// The trace-preserving conditional expectation `E: A → B` for an embedding
/// `B ⊂ A` and a faithful trace on `A`.
///
/// `E` is the orthogonal projection onto `ι(B)` for `⟨x, y⟩ = tr(x* y)`.
#[derive(Debug, Clone)]
pub struct ConditionalExpectation {
    embedding: UnitalEmbedding,
    trace: TraceState,
    to_source: CMat,
    projection: CMat,
}

impl ConditionalExpectation {
    pub fn new(embedding: &UnitalEmbedding, trace: &TraceState) -> Result<Self> {
        trace.check_on(embedding.target())?;
        let m = embedding.matrix();
        let w = trace.gram_matrix();
        let gram = m.adjoint() * &w * m;
        let scale = gram.iter().fold(0.0f64, |a, z| a.max(z.norm()));
        let inv = gram.try_inverse().ok_or(Error::SingularGram)?;
        if !inv.iter().all(|z| z.re.is_finite() && z.im.is_finite())
            || inv.iter().fold(0.0f64, |a, z| a.max(z.norm())) * scale > 1e12
        {
            return Err(Error::SingularGram);
        }
        let to_source = inv * m.adjoint() * &w;
        let projection = m * &to_source;
        Ok(Self { embedding: embedding.clone(), trace: trace.clone(), to_source, projection })
    }

    pub fn embedding(&self) -> &UnitalEmbedding {
        &self.embedding
    }

    pub fn trace(&self) -> &TraceState {
        &self.trace
    }

    pub fn source(&self) -> &MultiMatrix {
        self.embedding.source()
    }

    pub fn ambient(&self) -> &MultiMatrix {
        self.embedding.target()
    }

    /// Coordinate matrix of `E` into the coordinates of `B`.
    pub fn matrix(&self) -> &CMat {
        &self.to_source
    }

    /// Coordinate matrix of `ι ∘ E` on `A`.
    pub fn projection(&self) -> &CMat {
        &self.projection
    }

    /// `E(x)` as an element of `B`.
    pub fn apply(&self, x: &AlgElem) -> AlgElem {
        self.source()
            .element_from_coords(&(&self.to_source * x.to_coords()))
            .expect("expectation has source rows")
    }

    /// `ι(E(x))` as an element of `A`.
    pub fn apply_in_ambient(&self, x: &AlgElem) -> AlgElem {
        self.ambient()
            .element_from_coords(&(&self.projection * x.to_coords()))
            .expect("projection has ambient rows")
    }

    /// Weights of the restriction of the trace to `B`.
    pub fn source_trace(&self) -> Result<TraceState> {
        let lambda = self.embedding.inclusion_matrix();
        let weights = (0..lambda.ncols())
            .map(|j| (0..lambda.nrows()).map(|i| lambda.get(i, j) as f64 * self.trace.weights()[i]).sum())
            .collect();
        TraceState::new(self.source(), weights)
    }

    /// Max residual of the bimodule property `E(b x b') = b E(x) b'` over
    /// matrix units `b, b'` of `B` and `x` of `A`.
    pub fn bimodule_residual(&self) -> f64 {
        let b_basis = self.source().basis();
        let a_basis = self.ambient().basis();
        let mut res: f64 = 0.0;
        for b in &b_basis {
            let ib = self.embedding.apply(b);
            for x in &a_basis {
                let left = self.apply(&(&ib * x));
                let right = b * &self.apply(x);
                res = res.max(left.distance(&right));
                let left = self.apply(&(x * &ib));
                let right = &self.apply(x) * b;
                res = res.max(left.distance(&right));
            }
        }
        res
    }

    pub fn is_idempotent(&self) -> bool {
        crate::linalg::max_abs(&(&self.projection * &self.projection - &self.projection)) < DEFAULT_TOL
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{cplx, real};

    #[test]
    fn onto_scalars_is_trace() {
        let a = MultiMatrix::new(vec![2, 1]).unwrap();
        let tr = TraceState::new(&a, vec![0.4, 0.2]).unwrap();
        let e = ConditionalExpectation::new(&UnitalEmbedding::scalars_into(&a), &tr).unwrap();
        let x = AlgElem::from_blocks(vec![
            CMat::from_row_slice(2, 2, &[real(1.0), cplx(0.0, 2.0), real(3.0), real(4.0)]),
            CMat::from_element(1, 1, real(5.0)),
        ]);
        let ex = e.apply(&x);
        assert!((ex.blocks[0][(0, 0)] - tr.eval(&x)).norm() < 1e-12);
    }

    #[test]
    fn averaging_on_c2() {
        let a = MultiMatrix::commutative(2).unwrap();
        let tr = TraceState::uniform(&a);
        let e = ConditionalExpectation::new(&UnitalEmbedding::scalars_into(&a), &tr).unwrap();
        let x = AlgElem::diagonal(&[real(1.0), real(3.0)]);
        let y = e.apply_in_ambient(&x);
        assert!(y.distance(&AlgElem::diagonal(&[real(2.0), real(2.0)])) < 1e-12);
        assert!(e.bimodule_residual() < 1e-12);
        assert!(e.is_idempotent());
    }
}
