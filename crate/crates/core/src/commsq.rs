//! Commuting squares
//!
//! ```text
//!   L ⊂ M
//!   ∪   ∪
//!   N ⊂ K
//! ```
//!
//! with every corner embedded in `M` and a faithful trace on `M`.

use rand::Rng;

use crate::bases::{verify_orthonormal, verify_right_basis, PPBasis, Side};
use crate::error::{Error, Result};
use crate::fdca::{
    restrict_trace, AlgElem, ConditionalExpectation, InclusionMatrix, MultiMatrix, TraceState,
    UnitalEmbedding,
};
use crate::linalg::{max_abs, random_unitary, rank, CMat, CVec, C64};

#[derive(Debug, Clone)]
pub struct CommutingSquare {
    pub n_into_k: UnitalEmbedding,
    pub n_into_l: UnitalEmbedding,
    pub k_into_m: UnitalEmbedding,
    pub l_into_m: UnitalEmbedding,
    pub trace: TraceState,
    n_into_m: UnitalEmbedding,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareCheck {
    pub ok: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NondegeneracyReport {
    pub ok: bool,
    pub rank_lk: usize,
    pub rank_kl: usize,
    pub dim_m: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormCriterion {
    pub ok: bool,
    pub lambda_norm_sq: f64,
    pub gamma_norm_sq: f64,
}

impl CommutingSquare {
    /// Checks that the corners fit together and that both paths from `N`
    /// to `M` agree.
    pub fn new(
        n_into_k: UnitalEmbedding,
        n_into_l: UnitalEmbedding,
        k_into_m: UnitalEmbedding,
        l_into_m: UnitalEmbedding,
        trace: TraceState,
        tol: f64,
    ) -> Result<Self> {
        if n_into_k.source() != n_into_l.source() {
            return Err(Error::InvalidSquare("the two legs start at different algebras".into()));
        }
        if k_into_m.target() != l_into_m.target() {
            return Err(Error::InvalidSquare("the two legs end at different algebras".into()));
        }
        trace.check_on(k_into_m.target())?;
        let via_k = n_into_k.then(&k_into_m).map_err(|e| Error::InvalidSquare(e.to_string()))?;
        let via_l = n_into_l.then(&l_into_m).map_err(|e| Error::InvalidSquare(e.to_string()))?;
        let d = via_k.distance(&via_l);
        if d > tol.max(1e-12) {
            return Err(Error::InvalidSquare(format!(
                "N → K → M and N → L → M differ by {d:.2e}"
            )));
        }
        Ok(Self { n_into_k, n_into_l, k_into_m, l_into_m, trace, n_into_m: via_k })
    }

    pub fn m(&self) -> &MultiMatrix {
        self.k_into_m.target()
    }

    pub fn n_into_m(&self) -> &UnitalEmbedding {
        &self.n_into_m
    }

    fn k_images(&self) -> Vec<AlgElem> {
        self.k_into_m.source().basis().iter().map(|x| self.k_into_m.apply(x)).collect()
    }

    fn l_images(&self) -> Vec<AlgElem> {
        self.l_into_m.source().basis().iter().map(|x| self.l_into_m.apply(x)).collect()
    }
}

/// `E_L(k) = E_N(k)` on a basis of `K` and `E_K(l) = E_N(l)` on a basis of
/// `L`, cross-checked against `E_K E_L = E_N`.
pub fn verify_commuting(sq: &CommutingSquare, tol: f64) -> Result<SquareCheck> {
    let el = ConditionalExpectation::new(&sq.l_into_m, &sq.trace)?;
    let ek = ConditionalExpectation::new(&sq.k_into_m, &sq.trace)?;
    let en = ConditionalExpectation::new(&sq.n_into_m, &sq.trace)?;
    let mut residual: f64 = 0.0;
    for k in sq.k_images() {
        residual = residual.max(el.apply_in_ambient(&k).distance(&en.apply_in_ambient(&k)));
    }
    for l in sq.l_images() {
        residual = residual.max(ek.apply_in_ambient(&l).distance(&en.apply_in_ambient(&l)));
    }
    let composed = ek.projection() * el.projection();
    residual = residual.max(max_abs(&(composed - en.projection())));
    Ok(SquareCheck { ok: residual <= tol, residual })
}

/// `span(L K) = M = span(K L)` by rank.
pub fn verify_nondegenerate(sq: &CommutingSquare, tol: f64) -> NondegeneracyReport {
    let ks = sq.k_images();
    let ls = sq.l_images();
    let mut lk: Vec<CVec> = Vec::with_capacity(ks.len() * ls.len());
    let mut kl: Vec<CVec> = Vec::with_capacity(ks.len() * ls.len());
    for l in &ls {
        for k in &ks {
            lk.push((l * k).to_coords());
            kl.push((k * l).to_coords());
        }
    }
    let rtol = tol.max(1e-10);
    let rank_lk = rank(&CMat::from_columns(&lk), rtol);
    let rank_kl = rank(&CMat::from_columns(&kl), rtol);
    let dim_m = sq.m().dim();
    NondegeneracyReport { ok: rank_lk == dim_m && rank_kl == dim_m, rank_lk, rank_kl, dim_m }
}

/// Sufficient criterion `‖Λ‖² = ‖Γ‖²` for the inclusion matrices of `N ⊂ K`
/// and `L ⊂ M`, both required to be connected.
pub fn nondegeneracy_by_norms(sq: &CommutingSquare, tol: f64) -> Result<NormCriterion> {
    let lambda = sq.n_into_k.inclusion_matrix();
    let gamma = sq.l_into_m.inclusion_matrix();
    if !lambda.is_connected() {
        return Err(Error::DisconnectedInclusion(format!("N ⊂ K has inclusion matrix {lambda}")));
    }
    if !gamma.is_connected() {
        return Err(Error::DisconnectedInclusion(format!("L ⊂ M has inclusion matrix {gamma}")));
    }
    let (a, b) = (lambda.norm_squared(), gamma.norm_squared());
    Ok(NormCriterion { ok: (a - b).abs() <= tol.max(1e-9) * a.max(1.0), lambda_norm_sq: a, gamma_norm_sq: b })
}

/// Re-reads a right basis of `K` over `N` as a right basis of `M` over `L`
/// and verifies it.
pub fn popa_transfer(sq: &CommutingSquare, basis: &PPBasis, tol: f64) -> Result<PPBasis> {
    if basis.ambient() != sq.k_into_m.source() || basis.subalgebra() != sq.n_into_k.source() {
        return Err(Error::InvalidSquare("basis does not live in K over N".into()));
    }
    let comm = verify_commuting(sq, tol)?;
    if !comm.ok {
        return Err(Error::NotCommutingSquare { residual: comm.residual });
    }
    let nd = verify_nondegenerate(sq, tol);
    if !nd.ok {
        return Err(Error::DegenerateSquare(format!(
            "span(LK) has dimension {} and span(KL) {} but dim M = {}",
            nd.rank_lk, nd.rank_kl, nd.dim_m
        )));
    }
    let k_trace = restrict_trace(&sq.k_into_m, &sq.trace)?;
    let input = PPBasis::new(sq.n_into_k.clone(), k_trace, basis.elements.clone(), Side::Right)?;
    let check = verify_right_basis(&input, tol)?;
    if !check.ok {
        return Err(Error::InputNotBasis { residual: check.residual });
    }
    let elements = basis.elements.iter().map(|x| sq.k_into_m.apply(x)).collect();
    let mut out = PPBasis::new(sq.l_into_m.clone(), sq.trace.clone(), elements, Side::Right)?;
    let check = verify_right_basis(&out, tol)?;
    if !check.ok {
        return Err(Error::TransferFailed { residual: check.residual });
    }
    if basis.orthonormal && verify_orthonormal(&input, tol)?.ok {
        out.orthonormal = verify_orthonormal(&out, tol)?.ok;
    }
    out.unitary = basis.unitary && crate::bases::verify_unitary(&out, tol).ok;
    Ok(out)
}

fn random_weights<R: Rng + ?Sized>(rng: &mut R, algebra: &MultiMatrix) -> TraceState {
    let w: Vec<f64> = (0..algebra.num_blocks()).map(|_| rng.random_range(0.2..1.0)).collect();
    TraceState::normalized(algebra, w).expect("positive weights")
}

fn random_inclusion<R: Rng + ?Sized>(rng: &mut R) -> (MultiMatrix, InclusionMatrix) {
    let kb = rng.random_range(1..=2usize);
    let nb: Vec<usize> = (0..kb).map(|_| rng.random_range(1..=2usize)).collect();
    let ka = rng.random_range(1..=2usize);
    let mut rows = Vec::with_capacity(ka);
    for _ in 0..ka {
        let mut row: Vec<usize> = (0..kb).map(|_| rng.random_range(0..=2usize)).collect();
        if row.iter().all(|&m| m == 0) {
            let j = rng.random_range(0..kb);
            row[j] = 1;
        }
        rows.push(row);
    }
    // every block of B must appear somewhere
    for j in 0..kb {
        if rows.iter().all(|r| r[j] == 0) {
            rows[0][j] = 1;
        }
    }
    (MultiMatrix::new(nb).unwrap(), InclusionMatrix::from_rows(&rows).unwrap())
}

fn twisted<R: Rng + ?Sized>(rng: &mut R, emb: &UnitalEmbedding) -> UnitalEmbedding {
    let us: Vec<CMat> = emb.target().block_dims().iter().map(|&n| random_unitary(rng, n)).collect();
    UnitalEmbedding::from_fn(
        emb.source().clone(),
        emb.target().clone(),
        |x| {
            let y = emb.apply(x);
            AlgElem::from_blocks(y.blocks.iter().zip(&us).map(|(b, u)| u * b * u.adjoint()).collect())
        },
        1e-9,
    )
    .expect("conjugate of an embedding is an embedding")
}

/// `N₀ ⊂ Q` placed as `1⊗N₀ ⊂ 1⊗Q, P⊗N₀ ⊂ P⊗Q` with a product trace, for
/// random `P`, `Q`, `N₀` with `dim(P⊗Q) ≤ max_dim`. The returned basis is a
/// right basis of `K = 1⊗Q` over `N = 1⊗N₀`.
pub fn random_tensor_square<R: Rng + ?Sized>(
    rng: &mut R,
    max_dim: usize,
) -> (CommutingSquare, PPBasis) {
    loop {
        let (n0, lambda) = random_inclusion(rng);
        let q_dims: Vec<usize> = (0..lambda.nrows())
            .map(|i| (0..lambda.ncols()).map(|j| lambda.get(i, j) * n0.block_dims()[j]).sum())
            .collect();
        let q = MultiMatrix::new(q_dims).unwrap();
        let kp = rng.random_range(1..=2usize);
        let p = MultiMatrix::new((0..kp).map(|_| rng.random_range(1..=2usize)).collect()).unwrap();
        if p.dim() * q.dim() > max_dim {
            continue;
        }
        let iota = twisted(rng, &UnitalEmbedding::from_multiplicities(n0.clone(), q.clone(), &lambda).unwrap());
        let tp = random_weights(rng, &p);
        let tq = random_weights(rng, &q);
        let m = p.tensor(&q);
        let weights: Vec<f64> =
            tp.weights().iter().flat_map(|a| tq.weights().iter().map(move |b| a * b)).collect();
        let trace = TraceState::normalized(&m, weights).unwrap();
        let tol = 1e-9;
        let scal_p = UnitalEmbedding::scalars_into(&p);
        let n_into_k = iota.clone();
        let n_into_l = scal_p.tensor(&UnitalEmbedding::identity(&n0), tol).unwrap();
        let k_into_m = scal_p.tensor(&UnitalEmbedding::identity(&q), tol).unwrap();
        let l_into_m = UnitalEmbedding::identity(&p).tensor(&iota, tol).unwrap();
        let sq = CommutingSquare::new(n_into_k, n_into_l, k_into_m, l_into_m, trace.clone(), 1e-9)
            .expect("tensor square fits together");
        let k_trace = restrict_trace(&sq.k_into_m, &trace).unwrap();
        let basis = crate::bases::standard_right_basis(&sq.n_into_k, &k_trace, 1e-9).unwrap();
        return (sq, basis);
    }
}

/// `N = ℂ`, `K` the diagonal of `M_n`, `L = H K H*` for a flat unitary
/// `H = D₁ F D₂` with random diagonal phases, normalized trace. The
/// returned basis is the DFT basis of `K` over `ℂ`.
pub fn random_hadamard_square<R: Rng + ?Sized>(rng: &mut R, n: usize) -> (CommutingSquare, PPBasis) {
    let m = MultiMatrix::full(n).unwrap();
    let k = MultiMatrix::commutative(n).unwrap();
    let phases = |rng: &mut R| -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(
            n,
            (0..n).map(|_| C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))),
        ))
    };
    let h = phases(rng) * crate::bases::dft_matrix(n) * phases(rng);
    let diag = |x: &AlgElem| -> CMat {
        CMat::from_diagonal(&CVec::from_iterator(n, x.blocks.iter().map(|b| b[(0, 0)])))
    };
    let k_into_m =
        UnitalEmbedding::from_fn(k.clone(), m.clone(), |x| AlgElem::from_blocks(vec![diag(x)]), 1e-9).unwrap();
    let l_into_m = UnitalEmbedding::from_fn(
        k.clone(),
        m.clone(),
        |x| AlgElem::from_blocks(vec![&h * diag(x) * h.adjoint()]),
        1e-9,
    )
    .unwrap();
    let sq = CommutingSquare::new(
        UnitalEmbedding::scalars_into(&k),
        UnitalEmbedding::scalars_into(&k),
        k_into_m,
        l_into_m,
        TraceState::uniform(&m),
        1e-9,
    )
    .expect("hadamard square fits together");
    let basis = crate::bases::dft_unitary_onb(n).unwrap();
    (sq, basis)
}
