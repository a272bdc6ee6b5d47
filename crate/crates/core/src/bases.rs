//! Pimsner–Popa bases: verification of the left, right, orthonormal and
//! unitary conditions, explicit generators, the flat-unitary
//! correspondence over `ℂⁿ`, the Fourier lift to the basic construction and
//! products along a tower.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fdca::{
    basic_construction, AlgElem, BasicConstructionData, ConditionalExpectation, MultiMatrix,
    TraceState, UnitalEmbedding,
};
use crate::linalg::{cplx, max_abs, real, CMat, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
    TwoSided,
}

impl Side {
    pub fn as_str(&self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::TwoSided => "two-sided",
        }
    }
}

/// A candidate basis of `A` over `B ⊂ A` with respect to a trace on `A`.
#[derive(Debug, Clone)]
pub struct PPBasis {
    pub embedding: UnitalEmbedding,
    pub trace: TraceState,
    pub elements: Vec<AlgElem>,
    pub side: Side,
    pub orthonormal: bool,
    pub unitary: bool,
}

/// Outcome of an expansion check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BasisCheck {
    pub ok: bool,
    pub residual: f64,
}

/// Both Gram matrices of a family, entries in `B`, row-major.
#[derive(Debug, Clone)]
pub struct OrthonormalityReport {
    pub ok: bool,
    /// `[E(λᵢ* λⱼ)]`.
    pub right_gram: Vec<AlgElem>,
    /// `[E(λᵢ λⱼ*)]`.
    pub left_gram: Vec<AlgElem>,
    pub right_residual: f64,
    pub left_residual: f64,
    pub size: usize,
}

impl OrthonormalityReport {
    /// Gram matrices as scalar matrices when `B = ℂ`.
    pub fn scalar_grams(&self) -> Option<(CMat, CMat)> {
        let n = self.size;
        if self.right_gram.iter().any(|x| x.blocks.len() != 1 || x.blocks[0].nrows() != 1) {
            return None;
        }
        let r = CMat::from_fn(n, n, |i, j| self.right_gram[i * n + j].blocks[0][(0, 0)]);
        let l = CMat::from_fn(n, n, |i, j| self.left_gram[i * n + j].blocks[0][(0, 0)]);
        Some((r, l))
    }
}

impl PPBasis {
    pub fn new(
        embedding: UnitalEmbedding,
        trace: TraceState,
        elements: Vec<AlgElem>,
        side: Side,
    ) -> Result<Self> {
        trace.check_on(embedding.target())?;
        for x in &elements {
            embedding.target().check_element(x)?;
        }
        Ok(Self { embedding, trace, elements, side, orthonormal: false, unitary: false })
    }

    pub fn ambient(&self) -> &MultiMatrix {
        self.embedding.target()
    }

    pub fn subalgebra(&self) -> &MultiMatrix {
        self.embedding.source()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Re-verifies and sets the orthonormal and unitary flags.
    pub fn certify(mut self, tol: f64) -> Result<Self> {
        self.orthonormal = verify_orthonormal(&self, tol)?.ok;
        self.unitary = verify_unitary(&self, tol).ok;
        Ok(self)
    }

    /// `Σᵢ tr(λᵢ* λᵢ)`; equals `‖Λ‖²` for an orthonormal basis and the Markov
    /// trace.
    pub fn index_count(&self) -> f64 {
        self.elements.iter().map(|x| self.trace.eval(&(&x.adjoint() * x)).re).sum()
    }

    fn expectation(&self) -> Result<ConditionalExpectation> {
        ConditionalExpectation::new(&self.embedding, &self.trace)
    }
}

/// Checks `x = Σⱼ λⱼ E(λⱼ* x)` on every matrix unit `x` of `A`.
pub fn verify_right_basis(basis: &PPBasis, tol: f64) -> Result<BasisCheck> {
    let e = basis.expectation()?;
    let a = basis.ambient();
    let adj: Vec<AlgElem> = basis.elements.iter().map(|l| l.adjoint()).collect();
    let mut residual: f64 = 0.0;
    for x in a.basis() {
        let mut sum = a.zero();
        for (l, la) in basis.elements.iter().zip(&adj) {
            sum = &sum + &(l * &e.apply_in_ambient(&(la * &x)));
        }
        residual = residual.max(sum.distance(&x));
    }
    Ok(BasisCheck { ok: residual <= tol, residual })
}

/// Checks `x = Σᵢ E(x λᵢ*) λᵢ` on every matrix unit `x` of `A`.
pub fn verify_left_basis(basis: &PPBasis, tol: f64) -> Result<BasisCheck> {
    let e = basis.expectation()?;
    let a = basis.ambient();
    let adj: Vec<AlgElem> = basis.elements.iter().map(|l| l.adjoint()).collect();
    let mut residual: f64 = 0.0;
    for x in a.basis() {
        let mut sum = a.zero();
        for (l, la) in basis.elements.iter().zip(&adj) {
            sum = &sum + &(&e.apply_in_ambient(&(&x * la)) * l);
        }
        residual = residual.max(sum.distance(&x));
    }
    Ok(BasisCheck { ok: residual <= tol, residual })
}

/// Both expansions.
pub fn verify_two_sided(basis: &PPBasis, tol: f64) -> Result<BasisCheck> {
    let r = verify_right_basis(basis, tol)?;
    let l = verify_left_basis(basis, tol)?;
    let residual = r.residual.max(l.residual);
    Ok(BasisCheck { ok: r.ok && l.ok, residual })
}

/// Verification matching the side of the candidate.
pub fn verify_basis(basis: &PPBasis, tol: f64) -> Result<BasisCheck> {
    match basis.side {
        Side::Right => verify_right_basis(basis, tol),
        Side::Left => verify_left_basis(basis, tol),
        Side::TwoSided => verify_two_sided(basis, tol),
    }
}

/// Computes both Gram matrices; the flag follows the side of the candidate
/// (right: `E(λᵢ*λⱼ) = δ`, left: `E(λᵢλⱼ*) = δ`, two-sided: both).
pub fn verify_orthonormal(basis: &PPBasis, tol: f64) -> Result<OrthonormalityReport> {
    let e = basis.expectation()?;
    let one = basis.subalgebra().one();
    let zero = basis.subalgebra().zero();
    let n = basis.len();
    let mut right_gram = Vec::with_capacity(n * n);
    let mut left_gram = Vec::with_capacity(n * n);
    let (mut rr, mut lr): (f64, f64) = (0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            let li = &basis.elements[i];
            let lj = &basis.elements[j];
            let target = if i == j { &one } else { &zero };
            let r = e.apply(&(&li.adjoint() * lj));
            let l = e.apply(&(li * &lj.adjoint()));
            rr = rr.max(r.distance(target));
            lr = lr.max(l.distance(target));
            right_gram.push(r);
            left_gram.push(l);
        }
    }
    let ok = match basis.side {
        Side::Right => rr <= tol,
        Side::Left => lr <= tol,
        Side::TwoSided => rr <= tol && lr <= tol,
    };
    Ok(OrthonormalityReport {
        ok,
        right_gram,
        left_gram,
        right_residual: rr,
        left_residual: lr,
        size: n,
    })
}

/// Checks `λ*λ = λλ* = 1` for every element.
pub fn verify_unitary(basis: &PPBasis, tol: f64) -> BasisCheck {
    let one = basis.ambient().one();
    let residual = basis.elements.iter().fold(0.0f64, |m, l| {
        m.max((&l.adjoint() * l).distance(&one)).max((l * &l.adjoint()).distance(&one))
    });
    BasisCheck { ok: residual <= tol, residual }
}

/// Cross-check of a right basis in the basic construction:
/// `Σⱼ λⱼ e₁ λⱼ* = 1`.
pub fn jones_cross_check(basis: &PPBasis, tol: f64) -> Result<BasisCheck> {
    let bc = basic_construction(&basis.embedding, &basis.trace, tol)?;
    let a1 = bc.a1();
    let mut sum = a1.zero();
    for l in &basis.elements {
        let il = bc.upper.apply(l);
        sum = &sum + &(&(&il * &bc.jones_projection) * &il.adjoint());
    }
    let residual = sum.distance(&a1.one());
    Ok(BasisCheck { ok: residual <= tol, residual })
}

#[cfg(test)]
fn omega(n: usize) -> C64 {
    omega_pow(n, 1)
}

/// `ωᵏ`, exact at multiples of a quarter turn.
fn omega_pow(n: usize, k: usize) -> C64 {
    let k = k % n;
    if (4 * k).is_multiple_of(n) {
        return [real(1.0), C64::new(0.0, -1.0), real(-1.0), C64::new(0.0, 1.0)][4 * k / n];
    }
    C64::from_polar(1.0, -2.0 * PI * k as f64 / n as f64)
}

/// `ℂⁿ` over `ℂ` with the uniform trace.
fn commutative_over_scalars(n: usize) -> Result<(MultiMatrix, UnitalEmbedding, TraceState)> {
    let a = MultiMatrix::commutative(n)?;
    let emb = UnitalEmbedding::scalars_into(&a);
    let tr = TraceState::uniform(&a);
    Ok((a, emb, tr))
}

/// The unitary DFT matrix `F[k, i] = ωᵏⁱ / √n`, `ω = e^{−2πi/n}`.
pub fn dft_matrix(n: usize) -> CMat {
    let s = 1.0 / (n as f64).sqrt();
    CMat::from_fn(n, n, |k, i| omega_pow(n, k * i) * s)
}

/// `λᵢ = √n · (column i of the DFT)`, a unitary two-sided orthonormal basis of
/// `ℂⁿ` over `ℂ`; `λ₀` is the unit.
pub fn dft_unitary_onb(n: usize) -> Result<PPBasis> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let (_, emb, tr) = commutative_over_scalars(n)?;
    let elements = (0..n)
        .map(|i| AlgElem::diagonal(&(0..n).map(|k| omega_pow(n, k * i)).collect::<Vec<_>>()))
        .collect();
    let mut b = PPBasis::new(emb, tr, elements, Side::TwoSided)?;
    b.orthonormal = true;
    b.unitary = true;
    Ok(b)
}

/// The identity and the three Pauli matrices.
pub fn pauli_matrices() -> [CMat; 4] {
    let z = real(0.0);
    let o = real(1.0);
    let i = cplx(0.0, 1.0);
    [
        CMat::identity(2, 2),
        CMat::from_row_slice(2, 2, &[z, o, o, z]),
        CMat::from_row_slice(2, 2, &[z, -i, i, z]),
        CMat::from_row_slice(2, 2, &[o, z, z, -o]),
    ]
}

fn full_over_scalars(n: usize, elements: Vec<CMat>) -> Result<PPBasis> {
    let a = MultiMatrix::full(n)?;
    let emb = UnitalEmbedding::scalars_into(&a);
    let tr = TraceState::uniform(&a);
    let elements = elements.into_iter().map(|m| AlgElem::from_blocks(vec![m])).collect();
    let mut b = PPBasis::new(emb, tr, elements, Side::TwoSided)?;
    b.orthonormal = true;
    b.unitary = true;
    Ok(b)
}

/// `{I, σx, σy, σz}` in `M₂` over `ℂ` with the normalized trace.
pub fn pauli_basis() -> Result<PPBasis> {
    full_over_scalars(2, pauli_matrices().to_vec())
}

/// Clock `U = diag(1, ω, …, ω^{n−1})` and shift `V eₖ = e_{k+1}`; they
/// satisfy `UV = ω VU`.
pub fn clock_and_shift(n: usize) -> (CMat, CMat) {
    let u = CMat::from_fn(n, n, |i, j| if i == j { omega_pow(n, i) } else { real(0.0) });
    let v = CMat::from_fn(n, n, |i, j| if i == (j + 1) % n { real(1.0) } else { real(0.0) });
    (u, v)
}

/// The `n²` products `UⁱVʲ`, `0 ≤ i, j < n`, ordered by `i` then `j`.
pub fn sylvester_weyl_basis(n: usize) -> Result<PPBasis> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let (u, v) = clock_and_shift(n);
    let mut elements = Vec::with_capacity(n * n);
    let mut ui = CMat::identity(n, n);
    for _ in 0..n {
        let mut m = ui.clone();
        for _ in 0..n {
            elements.push(m.clone());
            m = &m * &v;
        }
        ui = &ui * &u;
    }
    full_over_scalars(n, elements)
}

/// `e⁽ᵇ⁾ᵢⱼ / √t_b` over all blocks: a two-sided orthonormal basis over `ℂ`.
pub fn matrix_unit_onb(algebra: &MultiMatrix, trace: &TraceState) -> Result<PPBasis> {
    trace.check_on(algebra)?;
    let emb = UnitalEmbedding::scalars_into(algebra);
    let elements = (0..algebra.dim())
        .map(|c| {
            let (b, i, j) = algebra.locate(c);
            algebra.matrix_unit(b, i, j).scale(real(1.0 / trace.weights()[b].sqrt()))
        })
        .collect();
    let mut b = PPBasis::new(emb, trace.clone(), elements, Side::TwoSided)?;
    b.orthonormal = true;
    b.unitary = algebra.dim() == 1;
    Ok(b)
}

/// A right basis of `A` over any `B ⊂ A`: in adapted frames,
/// `λ = √(t^B_j / t_i) · e⁽ⁱ⁾_{a,(j,r,0)}` over blocks `i`, rows `a`, and the
/// copies `(j, r)` of the blocks of `B`.
pub fn standard_right_basis(embedding: &UnitalEmbedding, trace: &TraceState, tol: f64) -> Result<PPBasis> {
    trace.check_on(embedding.target())?;
    let a = embedding.target();
    let lambda = embedding.inclusion_matrix();
    let nb = embedding.source().block_dims();
    let frames = embedding.adapted_frames(tol)?;
    let tb: Vec<f64> = (0..lambda.ncols())
        .map(|j| (0..lambda.nrows()).map(|i| lambda.get(i, j) as f64 * trace.weights()[i]).sum())
        .collect();
    let mut elements = Vec::new();
    for i in 0..a.num_blocks() {
        let ni = a.block_dims()[i];
        let mut col = 0;
        for j in 0..lambda.ncols() {
            let c = (tb[j] / trace.weights()[i]).sqrt();
            for _ in 0..lambda.get(i, j) {
                for row in 0..ni {
                    let mut x = a.zero();
                    let mut unit = CMat::zeros(ni, ni);
                    unit[(row, col)] = real(c);
                    x.blocks[i] = &frames[i] * unit * frames[i].adjoint();
                    elements.push(x);
                }
                col += nb[j];
            }
        }
    }
    PPBasis::new(embedding.clone(), trace.clone(), elements, Side::Right)
}

/// Unitary orthonormal basis over `ℂ` for the Markov trace of `ℂ ⊂ A`, when
/// `A` is simple or commutative.
pub fn canonical_unitary_onb(algebra: &MultiMatrix) -> Result<PPBasis> {
    if algebra.is_commutative() {
        dft_unitary_onb(algebra.num_blocks())
    } else if algebra.is_simple() {
        sylvester_weyl_basis(algebra.block_dims()[0])
    } else {
        Err(Error::UnsupportedAlgebraShape(format!(
            "{} is neither simple nor commutative",
            algebra
        )))
    }
}

/// `λᵢ = √n · (u_{1i}, …, u_{ni})` for a flat unitary `U`.
pub fn onb_from_flat_unitary(u: &CMat, tol: f64) -> Result<PPBasis> {
    let n = u.nrows();
    if n == 0 || u.ncols() != n {
        return Err(Error::ShapeMismatch("expected a nonempty square matrix".into()));
    }
    let res = max_abs(&(u.adjoint() * u - CMat::identity(n, n)));
    if res > tol {
        return Err(Error::NotUnitary { residual: res });
    }
    let target = 1.0 / (n as f64).sqrt();
    let deviation = u.iter().fold(0.0f64, |m, z| m.max((z.norm() - target).abs()));
    if deviation > tol {
        return Err(Error::NotFlat { deviation });
    }
    let (_, emb, tr) = commutative_over_scalars(n)?;
    let s = (n as f64).sqrt();
    let elements = (0..n)
        .map(|i| AlgElem::diagonal(&(0..n).map(|k| u[(k, i)] * s).collect::<Vec<_>>()))
        .collect();
    let mut b = PPBasis::new(emb, tr, elements, Side::TwoSided)?;
    b.orthonormal = true;
    b.unitary = true;
    Ok(b)
}

/// Inverse of [`onb_from_flat_unitary`]: `u_{ji} = λᵢ(j) / √n`.
pub fn flat_unitary_from_onb(basis: &PPBasis, tol: f64) -> Result<CMat> {
    let a = basis.ambient();
    let n = a.num_blocks();
    if !a.is_commutative() || basis.subalgebra().dim() != 1 || basis.len() != n {
        return Err(Error::NotUnitaryOnb(format!(
            "expected {n} elements of a commutative algebra over ℂ"
        )));
    }
    if basis.trace.max_weight_difference(&TraceState::uniform(a)) > tol {
        return Err(Error::NotUnitaryOnb("trace is not uniform".into()));
    }
    let unit = verify_unitary(basis, tol);
    if !unit.ok {
        return Err(Error::NotUnitaryOnb(format!("elements are not unitary (residual {:.2e})", unit.residual)));
    }
    let orth = verify_orthonormal(basis, tol)?;
    if orth.right_residual > tol {
        return Err(Error::NotUnitaryOnb(format!(
            "elements are not orthonormal (residual {:.2e})",
            orth.right_residual
        )));
    }
    let s = 1.0 / (n as f64).sqrt();
    Ok(CMat::from_fn(n, n, |j, i| basis.elements[i].blocks[j][(0, 0)] * s))
}

/// `v_k = Σᵢ ωᵏⁱ λᵢ e₁ λᵢ*`, `ω = e^{−2πi/n}`: a two-sided unitary
/// orthonormal basis of `A₁` over `A` for the extended trace.
pub fn fourier_lift(basis: &PPBasis, bc: &BasicConstructionData, tol: f64) -> Result<PPBasis> {
    if basis.ambient() != bc.lower.target() || basis.subalgebra() != bc.lower.source() {
        return Err(Error::IncompatibleTower("basis and basic construction use different algebras".into()));
    }
    let n = basis.len();
    let unit = verify_unitary(basis, tol);
    if !unit.ok {
        return Err(Error::NotUnitaryOnb(format!("elements are not unitary (residual {:.2e})", unit.residual)));
    }
    let orth = verify_orthonormal(&PPBasis { side: Side::Right, ..basis.clone() }, tol)?;
    if !orth.ok {
        return Err(Error::NotUnitaryOnb(format!(
            "elements are not orthonormal (residual {:.2e})",
            orth.right_residual
        )));
    }
    let tau_n = bc.tau * n as f64;
    if (tau_n - 1.0).abs() > tol.max(1e-9) * 10.0 {
        return Err(Error::NonMarkovTrace { tau_n });
    }
    let a1 = bc.a1();
    let conj: Vec<AlgElem> = basis
        .elements
        .iter()
        .map(|l| {
            let il = bc.upper.apply(l);
            &(&il * &bc.jones_projection) * &il.adjoint()
        })
        .collect();
    let elements = (0..n)
        .map(|k| {
            let mut v = a1.zero();
            for (i, c) in conj.iter().enumerate() {
                v = &v + &c.scale(omega_pow(n, k * i));
            }
            v
        })
        .collect();
    PPBasis::new(bc.upper.clone(), bc.extended_trace.clone(), elements, Side::TwoSided)?.certify(tol)
}

/// `{vⱼ uᵢ}` for a basis `{uᵢ}` of `R` over `N` and `{vⱼ}` of `M` over `R`.
pub fn product_basis(inner: &PPBasis, outer: &PPBasis, tol: f64) -> Result<PPBasis> {
    if inner.ambient() != outer.subalgebra() {
        return Err(Error::IncompatibleTower(format!(
            "inner basis lives in {} but the outer one is over {}",
            inner.ambient(),
            outer.subalgebra()
        )));
    }
    let embedding = inner.embedding.then(&outer.embedding)?;
    let mut elements = Vec::with_capacity(inner.len() * outer.len());
    for v in &outer.elements {
        for u in &inner.elements {
            elements.push(v * &outer.embedding.apply(u));
        }
    }
    let side = if inner.side == Side::TwoSided && outer.side == Side::TwoSided {
        Side::TwoSided
    } else {
        Side::Right
    };
    let mut b = PPBasis::new(embedding, outer.trace.clone(), elements, side)?;
    if inner.orthonormal && outer.orthonormal {
        b.orthonormal = verify_orthonormal(&b, tol)?.ok;
    }
    if inner.unitary && outer.unitary {
        b.unitary = verify_unitary(&b, tol).ok;
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdca::markov_trace_for;

    #[test]
    fn dft2_is_plus_minus() {
        let b = dft_unitary_onb(2).unwrap();
        assert!(b.elements[0].distance(&AlgElem::diagonal(&[real(1.0), real(1.0)])) < 1e-15);
        assert!(b.elements[1].distance(&AlgElem::diagonal(&[real(1.0), real(-1.0)])) < 1e-15);
        assert!(verify_two_sided(&b, 1e-12).unwrap().ok);
    }

    #[test]
    fn incomplete_family_fails() {
        let (_, emb, tr) = commutative_over_scalars(2).unwrap();
        let b = PPBasis::new(emb, tr, vec![AlgElem::diagonal(&[real(1.0), real(0.0)])], Side::Right).unwrap();
        assert!(!verify_right_basis(&b, 1e-9).unwrap().ok);
    }

    #[test]
    fn duplicate_unit_is_not_orthonormal() {
        let (a, emb, tr) = commutative_over_scalars(2).unwrap();
        let b = PPBasis::new(emb, tr, vec![a.one(), a.one()], Side::Right).unwrap();
        let r = verify_orthonormal(&b, 1e-9).unwrap();
        assert!(!r.ok);
        let (g, _) = r.scalar_grams().unwrap();
        assert!((g[(0, 1)] - real(1.0)).norm() < 1e-12);
    }

    #[test]
    fn pauli_gram_is_identity() {
        let b = pauli_basis().unwrap();
        let r = verify_orthonormal(&b, 1e-12).unwrap();
        let (g, l) = r.scalar_grams().unwrap();
        assert!(max_abs(&(g - CMat::identity(4, 4))) < 1e-12);
        assert!(max_abs(&(l - CMat::identity(4, 4))) < 1e-12);
        assert!(verify_left_basis(&b, 1e-12).unwrap().ok);
        assert!(jones_cross_check(&b, 1e-10).unwrap().ok);
    }

    #[test]
    fn clock_shift_commutation() {
        for n in 2..=5 {
            let (u, v) = clock_and_shift(n);
            assert!(max_abs(&(&u * &v - (&v * &u) * omega(n))) < 1e-12);
        }
    }

    #[test]
    fn weighted_matrix_units() {
        let c2 = MultiMatrix::commutative(2).unwrap();
        let tr = TraceState::new(&c2, vec![0.75, 0.25]).unwrap();
        let b = matrix_unit_onb(&c2, &tr).unwrap();
        assert!((b.elements[0].blocks[0][(0, 0)].re - 2.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((b.elements[1].blocks[1][(0, 0)].re - 2.0).abs() < 1e-12);
        assert!(verify_two_sided(&b, 1e-12).unwrap().ok);
    }

    #[test]
    fn standard_basis_for_twisted_embedding() {
        let b = MultiMatrix::new(vec![1, 2]).unwrap();
        let a = MultiMatrix::new(vec![3, 2]).unwrap();
        let lambda = crate::fdca::InclusionMatrix::from_rows(&[vec![1, 1], vec![0, 1]]).unwrap();
        let emb = UnitalEmbedding::from_multiplicities(b, a.clone(), &lambda).unwrap();
        let tr = TraceState::normalized(&a, vec![0.3, 0.1]).unwrap();
        let basis = standard_right_basis(&emb, &tr, 1e-10).unwrap();
        assert!(verify_right_basis(&basis, 1e-12).unwrap().ok);
        assert!(jones_cross_check(&basis, 1e-10).unwrap().ok);
    }

    #[test]
    fn mixed_shape_is_unsupported() {
        let a = MultiMatrix::new(vec![2, 1]).unwrap();
        assert!(matches!(canonical_unitary_onb(&a), Err(Error::UnsupportedAlgebraShape(_))));
    }

    #[test]
    fn identity_is_not_flat() {
        assert!(matches!(onb_from_flat_unitary(&CMat::identity(2, 2), 1e-9), Err(Error::NotFlat { .. })));
    }

    #[test]
    fn fourier_lift_for_c2() {
        let b = dft_unitary_onb(2).unwrap();
        let bc = basic_construction(&b.embedding, &b.trace, 1e-9).unwrap();
        let lift = fourier_lift(&b, &bc, 1e-9).unwrap();
        let x = CMat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
        assert!(max_abs(&(&lift.elements[1].blocks[0] - x)) < 1e-15);
        assert!(lift.unitary && lift.orthonormal);
    }

    #[test]
    fn product_over_diagonal() {
        let m2 = MultiMatrix::full(2).unwrap();
        let c2 = MultiMatrix::commutative(2).unwrap();
        let diag = UnitalEmbedding::from_multiplicities(
            c2.clone(),
            m2.clone(),
            &crate::fdca::InclusionMatrix::from_rows(&[vec![1, 1]]).unwrap(),
        )
        .unwrap();
        let [id, sx, _, _] = pauli_matrices();
        let outer = PPBasis::new(
            diag,
            TraceState::uniform(&m2),
            vec![AlgElem::from_blocks(vec![id]), AlgElem::from_blocks(vec![sx])],
            Side::TwoSided,
        )
        .unwrap()
        .certify(1e-12)
        .unwrap();
        assert!(verify_two_sided(&outer, 1e-12).unwrap().ok);
        let inner = dft_unitary_onb(2).unwrap();
        let p = product_basis(&inner, &outer, 1e-12).unwrap();
        assert_eq!(p.len(), 4);
        assert!(p.orthonormal && p.unitary);
        assert!(verify_right_basis(&p, 1e-12).unwrap().ok);
        let mt = markov_trace_for(&p.embedding).unwrap();
        assert!((p.index_count() - mt.beta).abs() < 1e-12);
    }
}
