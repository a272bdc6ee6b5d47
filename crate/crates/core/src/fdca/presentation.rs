use crate::error::{Error, Result};
use crate::fdca::algebra::MultiMatrix;
use crate::fdca::trace::TraceState;
use crate::linalg::{max_abs, max_abs_vec, null_space, real, CMat, CVec, C64};

/// A finite-dimensional *-algebra given by structure constants.
///
/// `structure[(i * d + j) * d + l]` is the coefficient of `e_l` in
/// `e_i e_j`. The involution is `x* = J · conj(x)`. An optional trace is a
/// linear functional given by its values on the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StarAlgebraPresentation {
    dim: usize,
    structure: Vec<C64>,
    unit: CVec,
    involution: CMat,
    trace: Option<CVec>,
}

/// Largest residuals of the presentation axioms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PresentationResiduals {
    pub associativity: f64,
    pub unit: f64,
    pub involutive: f64,
    pub anti_multiplicative: f64,
}

impl PresentationResiduals {
    pub fn max(&self) -> f64 {
        self.associativity.max(self.unit).max(self.involutive).max(self.anti_multiplicative)
    }
}

impl StarAlgebraPresentation {
    /// Builds a presentation and checks associativity, unit and involution
    /// laws within `tol`.
    pub fn new(
        dim: usize,
        structure: Vec<C64>,
        unit: CVec,
        involution: CMat,
        trace: Option<CVec>,
        tol: f64,
    ) -> Result<Self> {
        let p = Self::new_unchecked(dim, structure, unit, involution, trace)?;
        let r = p.residuals();
        if r.max() > tol {
            return Err(Error::InvalidStructure(format!(
                "presentation axioms fail: associativity {:.2e}, unit {:.2e}, involution {:.2e}/{:.2e}",
                r.associativity, r.unit, r.involutive, r.anti_multiplicative
            )));
        }
        Ok(p)
    }

    /// Builds a presentation checking only shapes.
    pub fn new_unchecked(
        dim: usize,
        structure: Vec<C64>,
        unit: CVec,
        involution: CMat,
        trace: Option<CVec>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidStructure("dimension must be positive".into()));
        }
        if structure.len() != dim * dim * dim {
            return Err(Error::ShapeMismatch(format!(
                "structure tensor needs {} entries, got {}",
                dim * dim * dim,
                structure.len()
            )));
        }
        if unit.len() != dim {
            return Err(Error::ShapeMismatch(format!("unit needs {dim} coordinates")));
        }
        if involution.nrows() != dim || involution.ncols() != dim {
            return Err(Error::ShapeMismatch(format!("involution must be {dim}x{dim}")));
        }
        if let Some(t) = &trace {
            if t.len() != dim {
                return Err(Error::ShapeMismatch(format!("trace needs {dim} values")));
            }
        }
        Ok(Self { dim, structure, unit, involution, trace })
    }

    /// Presentation of a multi-matrix algebra in its matrix-unit basis,
    /// optionally carrying a trace.
    pub fn from_multi_matrix(algebra: &MultiMatrix, trace: Option<&TraceState>) -> Self {
        let d = algebra.dim();
        let mut structure = vec![C64::new(0.0, 0.0); d * d * d];
        let mut involution = CMat::zeros(d, d);
        for c1 in 0..d {
            let (b1, i1, j1) = algebra.locate(c1);
            involution[(algebra.coord(b1, j1, i1), c1)] = real(1.0);
            let n = algebra.block_dims()[b1];
            for k in 0..n {
                let c2 = algebra.coord(b1, j1, k);
                structure[(c1 * d + c2) * d + algebra.coord(b1, i1, k)] = real(1.0);
            }
        }
        let unit = algebra.one().to_coords();
        let trace = trace.map(|t| {
            CVec::from_iterator(
                d,
                (0..d).map(|c| {
                    let (b, i, j) = algebra.locate(c);
                    if i == j {
                        real(t.weights()[b])
                    } else {
                        real(0.0)
                    }
                }),
            )
        });
        Self { dim: d, structure, unit, involution, trace }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn structure(&self) -> &[C64] {
        &self.structure
    }

    #[inline]
    pub fn constant(&self, i: usize, j: usize, l: usize) -> C64 {
        self.structure[(i * self.dim + j) * self.dim + l]
    }

    pub fn unit(&self) -> &CVec {
        &self.unit
    }

    pub fn involution(&self) -> &CMat {
        &self.involution
    }

    pub fn attached_trace(&self) -> Option<&CVec> {
        self.trace.as_ref()
    }

    pub fn with_trace(mut self, trace: Option<CVec>) -> Self {
        self.trace = trace;
        self
    }

    pub fn basis_vector(&self, i: usize) -> CVec {
        let mut v = CVec::zeros(self.dim);
        v[i] = real(1.0);
        v
    }

    pub fn mul(&self, x: &CVec, y: &CVec) -> CVec {
        let d = self.dim;
        let mut out = CVec::zeros(d);
        for i in 0..d {
            if x[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                let c = x[i] * y[j];
                if c == C64::new(0.0, 0.0) {
                    continue;
                }
                let base = (i * d + j) * d;
                for l in 0..d {
                    let s = self.structure[base + l];
                    if s != C64::new(0.0, 0.0) {
                        out[l] += c * s;
                    }
                }
            }
        }
        out
    }

    pub fn star(&self, x: &CVec) -> CVec {
        &self.involution * x.map(|z| z.conj())
    }

    /// Matrix of `y ↦ x y`.
    pub fn left_mul_matrix(&self, x: &CVec) -> CMat {
        let d = self.dim;
        let mut out = CMat::zeros(d, d);
        for i in 0..d {
            if x[i] == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..d {
                for l in 0..d {
                    out[(l, j)] += x[i] * self.constant(i, j, l);
                }
            }
        }
        out
    }

    /// Matrix of `x ↦ x y`.
    pub fn right_mul_matrix(&self, y: &CVec) -> CMat {
        let d = self.dim;
        let mut out = CMat::zeros(d, d);
        for j in 0..d {
            if y[j] == C64::new(0.0, 0.0) {
                continue;
            }
            for i in 0..d {
                for l in 0..d {
                    out[(l, i)] += y[j] * self.constant(i, j, l);
                }
            }
        }
        out
    }

    pub fn residuals(&self) -> PresentationResiduals {
        let d = self.dim;
        let basis: Vec<CVec> = (0..d).map(|i| self.basis_vector(i)).collect();
        let lefts: Vec<CMat> = basis.iter().map(|b| self.left_mul_matrix(b)).collect();
        let mut assoc: f64 = 0.0;
        // L_{e_i e_j} = L_{e_i} L_{e_j}
        for i in 0..d {
            for j in 0..d {
                let prod = self.mul(&basis[i], &basis[j]);
                let lhs = self.left_mul_matrix(&prod);
                let rhs = &lefts[i] * &lefts[j];
                assoc = assoc.max(max_abs(&(lhs - rhs)));
            }
        }
        let lu = self.left_mul_matrix(&self.unit);
        let ru = self.right_mul_matrix(&self.unit);
        let id = CMat::identity(d, d);
        let unit = max_abs(&(lu - &id)).max(max_abs(&(ru - &id)));
        let jj = &self.involution * self.involution.map(|z| z.conj());
        let involutive = max_abs(&(jj - &id));
        let mut anti: f64 = 0.0;
        let stars: Vec<CVec> = basis.iter().map(|b| self.star(b)).collect();
        for i in 0..d {
            for j in 0..d {
                let lhs = self.star(&self.mul(&basis[i], &basis[j]));
                let rhs = self.mul(&stars[j], &stars[i]);
                anti = anti.max(max_abs_vec(&(lhs - rhs)));
            }
        }
        PresentationResiduals { associativity: assoc, unit, involutive, anti_multiplicative: anti }
    }

    pub fn is_commutative(&self, tol: f64) -> bool {
        let d = self.dim;
        (0..d).all(|i| {
            (0..d).all(|j| (0..d).all(|l| (self.constant(i, j, l) - self.constant(j, i, l)).norm() <= tol))
        })
    }

    /// The attached trace, or the normalized trace of the left regular
    /// representation `x ↦ Tr(L_x) / d`.
    pub fn trace_functional(&self) -> CVec {
        if let Some(t) = &self.trace {
            return t.clone();
        }
        let d = self.dim;
        CVec::from_iterator(
            d,
            (0..d).map(|i| {
                let mut s = C64::new(0.0, 0.0);
                for j in 0..d {
                    s += self.constant(i, j, j);
                }
                s / d as f64
            }),
        )
    }

    pub fn eval_trace(&self, x: &CVec) -> C64 {
        self.trace_functional().dot(x)
    }

    /// Gram matrix `[φ(e_i* e_j)]` of the trace form.
    pub fn trace_gram(&self) -> CMat {
        let phi = self.trace_functional();
        let d = self.dim;
        let stars: Vec<CVec> = (0..d).map(|i| self.star(&self.basis_vector(i))).collect();
        CMat::from_fn(d, d, |i, j| phi.dot(&self.mul(&stars[i], &self.basis_vector(j))))
    }

    /// Orthonormal basis (standard inner product on coordinates) of the
    /// center, found by solving `x e_j = e_j x` for all `j`.
    pub fn center(&self, tol: f64) -> CMat {
        let d = self.dim;
        let mut stacked = CMat::zeros(d * d, d);
        for j in 0..d {
            let e = self.basis_vector(j);
            let diff = self.right_mul_matrix(&e) - self.left_mul_matrix(&e);
            stacked.view_mut((j * d, 0), (d, d)).copy_from(&diff);
        }
        null_space(&stacked, tol)
    }

    /// Max residual of closure of the column span of `basis` under product
    /// and involution.
    pub fn subspace_closure_residual(&self, basis: &CMat) -> f64 {
        let k = basis.ncols();
        if k == 0 {
            return 0.0;
        }
        let q = crate::linalg::column_space(basis, 1e-10);
        let proj = &q * q.adjoint();
        let cols: Vec<CVec> = (0..k).map(|i| basis.column(i).into_owned()).collect();
        let mut res: f64 = 0.0;
        for x in &cols {
            let s = self.star(x);
            res = res.max(max_abs_vec(&(&s - &proj * &s)));
            for y in &cols {
                let p = self.mul(x, y);
                res = res.max(max_abs_vec(&(&p - &proj * &p)));
            }
        }
        res
    }

    /// Presentation of the subalgebra spanned by the columns of `basis`
    /// (assumed linearly independent and closed), in that basis.
    pub fn subalgebra(&self, basis: &CMat, tol: f64) -> Result<StarAlgebraPresentation> {
        let k = basis.ncols();
        let res = self.subspace_closure_residual(basis);
        if res > tol.max(1e-8) {
            return Err(Error::NotASubalgebra { residual: res });
        }
        let pinv = crate::linalg::left_inverse(basis)?;
        let cols: Vec<CVec> = (0..k).map(|i| basis.column(i).into_owned()).collect();
        let mut structure = vec![C64::new(0.0, 0.0); k * k * k];
        for i in 0..k {
            for j in 0..k {
                let c = &pinv * self.mul(&cols[i], &cols[j]);
                for l in 0..k {
                    structure[(i * k + j) * k + l] = c[l];
                }
            }
        }
        let unit = &pinv * &self.unit;
        let unit_res = max_abs_vec(&(basis * &unit - &self.unit));
        if unit_res > tol.max(1e-8) {
            return Err(Error::NotUnital { residual: unit_res });
        }
        // x* = J conj(x) in the sub-basis: J_sub = P J conj(B)
        let involution = &pinv * &self.involution * basis.map(|z| z.conj());
        let trace = self.trace.as_ref().map(|t| basis.transpose() * t);
        Self::new_unchecked(k, structure, unit, involution, trace)
    }
}
