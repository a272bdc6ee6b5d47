use crate::error::{Error, Result};
use crate::fdca::algebra::{AlgElem, MultiMatrix};
use crate::fdca::embedding::UnitalEmbedding;
use crate::fdca::presentation::StarAlgebraPresentation;
use crate::fdca::wedderburn::wedderburn;
use crate::linalg::{null_space, CMat};

/// A *-subalgebra of a multi-matrix algebra, given by a column basis in
/// the ambient coordinates.
#[derive(Debug, Clone)]
pub struct Subalgebra {
    ambient: MultiMatrix,
    basis: CMat,
}

impl Subalgebra {
    pub fn new(ambient: &MultiMatrix, basis: CMat) -> Result<Self> {
        if basis.nrows() != ambient.dim() {
            return Err(Error::ShapeMismatch("basis rows must match the ambient dimension".into()));
        }
        Ok(Self { ambient: ambient.clone(), basis })
    }

    pub fn ambient(&self) -> &MultiMatrix {
        &self.ambient
    }

    pub fn basis(&self) -> &CMat {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn elements(&self) -> Vec<AlgElem> {
        (0..self.dim())
            .map(|c| self.ambient.element_from_coords(&self.basis.column(c).into_owned()).unwrap())
            .collect()
    }

    /// Max residual of closure under product and adjoint.
    pub fn closure_residual(&self) -> f64 {
        StarAlgebraPresentation::from_multi_matrix(&self.ambient, None).subspace_closure_residual(&self.basis)
    }

    /// Identifies the subalgebra with a multi-matrix algebra and returns the
    /// inclusion into the ambient algebra.
    pub fn to_embedding(&self, seed: u64, tol: f64) -> Result<UnitalEmbedding> {
        let parent = StarAlgebraPresentation::from_multi_matrix(&self.ambient, None);
        let sub = parent.subalgebra(&self.basis, tol)?;
        let w = wedderburn(&sub, seed, tol)?;
        let map = &self.basis * &w.phi;
        UnitalEmbedding::from_matrix(w.algebra, self.ambient.clone(), map, tol.max(1e-8))
    }
}

/// `{x ∈ A : x ι(b) = ι(b) x for all b}` as an orthonormal column basis.
pub fn relative_commutant(emb: &UnitalEmbedding, tol: f64) -> Subalgebra {
    let a = emb.target();
    let d = a.dim();
    let src = emb.source().basis();
    let mut stacked = CMat::zeros(d * src.len(), d);
    for (k, b) in src.iter().enumerate() {
        let ib = emb.apply(b);
        let diff = a.right_mul_matrix(&ib) - a.left_mul_matrix(&ib);
        stacked.view_mut((k * d, 0), (d, d)).copy_from(&diff);
    }
    Subalgebra { ambient: a.clone(), basis: null_space(&stacked, tol.max(1e-12)) }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn commutant_examples() {
        let m3 = MultiMatrix::full(3).unwrap();
        assert_eq!(relative_commutant(&UnitalEmbedding::identity(&m3), 1e-10).dim(), 1);
        let a = MultiMatrix::new(vec![2, 1]).unwrap();
        assert_eq!(relative_commutant(&UnitalEmbedding::scalars_into(&a), 1e-10).dim(), 5);
        let m2 = MultiMatrix::full(2).unwrap();
        let c2 = MultiMatrix::commutative(2).unwrap();
        let target = m2.tensor(&c2);
        let e = UnitalEmbedding::from_fn(m2, target, |x| x.tensor(&c2.one()), 1e-12).unwrap();
        let rc = relative_commutant(&e, 1e-10);
        assert_eq!(rc.dim(), 2);
        assert!(rc.closure_residual() < 1e-10);
        let inc = rc.to_embedding(3, 1e-9).unwrap();
        assert_eq!(inc.source().block_dims(), &[1, 1]);
    }
}
