use crate::error::{Error, Result};
use crate::fdca::algebra::{AlgElem, MultiMatrix};
use crate::fdca::embedding::{InclusionMatrix, UnitalEmbedding};
use crate::fdca::expectation::ConditionalExpectation;
use crate::fdca::trace::TraceState;
use crate::linalg::{column_space, rank, CMat, CVec, C64};

/// The tower `B ⊂ A ⊂ A₁ = ⟨A, e₁⟩` realized on `L²(A, tr)`.
#[derive(Debug, Clone)]
pub struct BasicConstructionData {
    pub lower: UnitalEmbedding,
    pub upper: UnitalEmbedding,
    pub jones_projection: AlgElem,
    /// `tr₁(e₁)`; equals `E_A(e₁)` when the trace is Markov.
    pub tau: f64,
    pub trace: TraceState,
    /// The trace on `A₁` with `tr₁(x e₁) = τ tr(x)` for `x ∈ A`.
    pub extended_trace: TraceState,
    /// True when `E_A(e₁)` is the scalar `τ`.
    pub is_markov: bool,
}

impl BasicConstructionData {
    pub fn a1(&self) -> &MultiMatrix {
        self.upper.target()
    }

    /// Max residual of `e₁ x e₁ = E_B(x) e₁` over the matrix units of `A`,
    /// together with the projection residual of `e₁`.
    pub fn jones_residual(&self) -> Result<f64> {
        let exp = ConditionalExpectation::new(&self.lower, &self.trace)?;
        Ok(jones_relation_residual(&self.upper, &exp, &self.jones_projection))
    }

    /// `E_A(e₁)` computed with the extended trace.
    pub fn expectation_of_jones(&self) -> Result<AlgElem> {
        let exp = ConditionalExpectation::new(&self.upper, &self.extended_trace)?;
        Ok(exp.apply(&self.jones_projection))
    }
}

/// Builds the basic construction of `B ⊂ A` for a faithful trace on `A`.
pub fn basic_construction(
    emb: &UnitalEmbedding,
    trace: &TraceState,
    tol: f64,
) -> Result<BasicConstructionData> {
    trace.check_on(emb.target())?;
    let a = emb.target();
    let b = emb.source();
    let lambda = emb.inclusion_matrix();
    let (ka, kb) = (lambda.nrows(), lambda.ncols());
    let na = a.block_dims();
    let nb = b.block_dims();
    let frames = emb.adapted_frames(tol)?;

    // A₁ = ⊕_j M_{m_j}, m_j = Σ_i Λ_ij n_i
    let m: Vec<usize> = (0..kb).map(|j| (0..ka).map(|i| lambda.get(i, j) * na[i]).sum()).collect();
    let a1 = MultiMatrix::new(m.clone())?;
    let lt = lambda.transpose();
    let upper = UnitalEmbedding::from_multiplicities(a.clone(), a1.clone(), &lt)?;

    // Coordinates of ⊕_j K_j ⊗ ℂ^{n_j}: index (j, k, s).
    let mut w_off = vec![0usize; kb];
    for j in 1..kb {
        w_off[j] = w_off[j - 1] + m[j - 1] * nb[j - 1];
    }
    let total = w_off[kb - 1] + m[kb - 1] * nb[kb - 1];
    // offset of (i, ·, ·) inside K_j and of (j, ·, ·) among the columns of V_i
    let k_off = |i: usize, j: usize| -> usize { (0..i).map(|i2| lambda.get(i2, j) * na[i2]).sum() };
    let col_off = |i: usize, j: usize| -> usize { (0..j).map(|j2| lambda.get(i, j2) * nb[j2]).sum() };

    let w_map = |x: &AlgElem| -> CVec {
        let mut out = CVec::zeros(total);
        for i in 0..ka {
            let y = &x.blocks[i] * &frames[i];
            let st = trace.weights()[i].sqrt();
            for j in 0..kb {
                let (ko, co) = (k_off(i, j), col_off(i, j));
                for r in 0..lambda.get(i, j) {
                    for p in 0..na[i] {
                        let k = ko + r * na[i] + p;
                        for s in 0..nb[j] {
                            out[w_off[j] + k * nb[j] + s] = y[(p, co + r * nb[j] + s)] * st;
                        }
                    }
                }
            }
        }
        out
    };

    let images: Vec<CVec> = b.basis().iter().map(|x| w_map(&emb.apply(x))).collect();
    let q = column_space(&CMat::from_columns(&images), 1e-10);
    if q.ncols() != b.dim() {
        return Err(Error::NumericalDegeneracy("image of B lost rank in L²(A)".into()));
    }
    let proj = &q * q.adjoint();

    let mut blocks = Vec::with_capacity(kb);
    for j in 0..kb {
        let e = CMat::from_fn(m[j], m[j], |k1, k2| proj[(w_off[j] + k1 * nb[j], w_off[j] + k2 * nb[j])]);
        blocks.push(e);
    }
    // P must equal ⊕_j E_j ⊗ I_{n_j}
    let mut form_res: f64 = 0.0;
    for j in 0..kb {
        for k1 in 0..m[j] {
            for k2 in 0..m[j] {
                for s1 in 0..nb[j] {
                    for s2 in 0..nb[j] {
                        let v = proj[(w_off[j] + k1 * nb[j] + s1, w_off[j] + k2 * nb[j] + s2)];
                        let expected = if s1 == s2 { blocks[j][(k1, k2)] } else { C64::new(0.0, 0.0) };
                        form_res = form_res.max((v - expected).norm());
                    }
                }
            }
        }
    }
    if form_res > 1e-8 {
        return Err(Error::NumericalDegeneracy(format!(
            "projection onto B does not commute with the right action (residual {form_res:.2e})"
        )));
    }
    let jones = AlgElem::from_blocks(blocks);

    let tb: Vec<f64> =
        (0..kb).map(|j| (0..ka).map(|i| lambda.get(i, j) as f64 * trace.weights()[i]).sum()).collect();
    let denom: f64 = (0..kb).map(|j| m[j] as f64 * tb[j]).sum();
    let extended_trace = TraceState::normalized(&a1, tb.clone())?;
    let tau = 1.0 / denom;

    let exp = ConditionalExpectation::new(&upper, &extended_trace)?;
    let ea = exp.apply(&jones);
    let is_markov = ea.distance(&a.one().scale(C64::new(tau, 0.0))) <= tol.max(1e-9) * 10.0
        && trace.max_weight_difference(&restrict_trace(&upper, &extended_trace)?) <= tol.max(1e-9) * 10.0;

    Ok(BasicConstructionData {
        lower: emb.clone(),
        upper,
        jones_projection: jones,
        tau,
        trace: trace.clone(),
        extended_trace,
        is_markov,
    })
}

/// Restriction of a trace on the target of `emb` to its source.
pub fn restrict_trace(emb: &UnitalEmbedding, trace: &TraceState) -> Result<TraceState> {
    let lambda = emb.inclusion_matrix();
    let weights = (0..lambda.ncols())
        .map(|j| (0..lambda.nrows()).map(|i| lambda.get(i, j) as f64 * trace.weights()[i]).sum())
        .collect();
    TraceState::normalized(emb.source(), weights)
}

fn jones_relation_residual(upper: &UnitalEmbedding, exp: &ConditionalExpectation, e: &AlgElem) -> f64 {
    let proj_res = (e * e).distance(e).max(e.adjoint().distance(e));
    let mut res = proj_res;
    for x in exp.ambient().basis() {
        let lhs = &(e * &upper.apply(&x)) * e;
        let rhs = &upper.apply(&exp.apply_in_ambient(&x)) * e;
        res = res.max(lhs.distance(&rhs));
    }
    res
}

/// Diagnostic for [`is_basic_construction_triple`].
#[derive(Debug, Clone)]
pub struct TripleReport {
    pub is_basic_construction: bool,
    /// The upper inclusion matrix is the transpose of the lower one up to a
    /// permutation of the blocks of `A₁`.
    pub transpose_shape: bool,
    /// `π` with row `π[j]` of the upper matrix equal to row `j` of `Λᵗ`.
    pub permutation: Option<Vec<usize>>,
    /// Residual of `e² = e = e*` and `e x e = E_B(x) e` for the witness.
    pub jones_residual: Option<f64>,
    pub witness: Option<AlgElem>,
    /// `dim span(A e A)`.
    pub span_rank: Option<usize>,
    /// `span(A e A) = A₁`.
    pub ideal_criterion: bool,
    pub reason: String,
}

/// Decides whether `B ⊂ A ⊂ A₁` is an instance of the basic construction
/// with respect to the restriction of `trace` (a trace on `A₁`).
pub fn is_basic_construction_triple(
    lower: &UnitalEmbedding,
    upper: &UnitalEmbedding,
    trace: &TraceState,
    tol: f64,
) -> Result<TripleReport> {
    if lower.target() != upper.source() {
        return Err(Error::IncompatibleTower(format!(
            "middle algebras differ: {} vs {}",
            lower.target(),
            upper.source()
        )));
    }
    trace.check_on(upper.target())?;
    let fail = |reason: String, transpose_shape: bool, permutation: Option<Vec<usize>>| TripleReport {
        is_basic_construction: false,
        transpose_shape,
        permutation,
        jones_residual: None,
        witness: None,
        span_rank: None,
        ideal_criterion: false,
        reason,
    };
    let lt = lower.inclusion_matrix().transpose();
    let l1 = upper.inclusion_matrix();
    let Some(perm) = l1.row_permutation_to(&lt) else {
        return Ok(fail(format!("upper inclusion matrix {l1} is not a row permutation of {lt}"), false, None));
    };
    let tr_a = restrict_trace(upper, trace)?;
    let canon = basic_construction(lower, &tr_a, tol)?;
    let frames = upper.adapted_frames(tol)?;
    let a1 = upper.target();
    let mut blocks: Vec<CMat> = a1.block_dims().iter().map(|&n| CMat::zeros(n, n)).collect();
    for (j, &pj) in perm.iter().enumerate() {
        let t = &canon.jones_projection.blocks[j];
        blocks[pj] = &frames[pj] * t * frames[pj].adjoint();
    }
    let e = AlgElem::from_blocks(blocks);
    let exp = ConditionalExpectation::new(lower, &tr_a)?;
    let residual = jones_relation_residual(upper, &exp, &e);
    let relation_ok = residual <= tol.max(1e-9) * 100.0;

    let a_basis: Vec<AlgElem> = upper.source().basis().iter().map(|x| upper.apply(x)).collect();
    let mut cols = Vec::with_capacity(a_basis.len() * a_basis.len());
    for x in &a_basis {
        let xe = x * &e;
        for y in &a_basis {
            cols.push((&xe * y).to_coords());
        }
    }
    let span = rank(&CMat::from_columns(&cols), 1e-8);
    let ideal = span == a1.dim();
    let ok = relation_ok && ideal;
    let reason = if ok {
        "transpose inclusion matrix, Jones relation and span(AeA) = A₁ verified".to_string()
    } else if !relation_ok {
        format!("witness projection fails the Jones relation (residual {residual:.2e})")
    } else {
        format!("span(AeA) has dimension {span} < {}", a1.dim())
    };
    Ok(TripleReport {
        is_basic_construction: ok,
        transpose_shape: true,
        permutation: Some(perm),
        jones_residual: Some(residual),
        witness: Some(e),
        span_rank: Some(span),
        ideal_criterion: ideal,
        reason,
    })
}

impl InclusionMatrix {
    /// Inclusion matrix of `A ⊂ A₁` in the basic construction.
    pub fn basic_construction_step(&self) -> InclusionMatrix {
        self.transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fdca::markov::markov_trace_for;
    use crate::linalg::real;

    #[test]
    fn commutative_tower_gives_flat_projection() {
        let n = 3;
        let a = MultiMatrix::commutative(n).unwrap();
        let emb = UnitalEmbedding::scalars_into(&a);
        let bc = basic_construction(&emb, &TraceState::uniform(&a), 1e-9).unwrap();
        assert_eq!(bc.a1().block_dims(), &[3]);
        let e = &bc.jones_projection.blocks[0];
        for z in e.iter() {
            assert!((z - real(1.0 / 3.0)).norm() < 1e-12);
        }
        assert!((bc.tau - 1.0 / 3.0).abs() < 1e-12);
        assert!(bc.is_markov);
        assert!(bc.jones_residual().unwrap() < 1e-12);
    }

    #[test]
    fn scalars_in_m2() {
        let a = MultiMatrix::full(2).unwrap();
        let emb = UnitalEmbedding::scalars_into(&a);
        let bc = basic_construction(&emb, &TraceState::uniform(&a), 1e-9).unwrap();
        assert_eq!(bc.a1().dim(), 16);
        assert!((bc.tau - 0.25).abs() < 1e-12);
        let ea = bc.expectation_of_jones().unwrap();
        assert!(ea.distance(&a.one().scale(real(0.25))) < 1e-12);
    }

    #[test]
    fn trivial_inclusion_gives_identity() {
        let a = MultiMatrix::new(vec![2, 1]).unwrap();
        let tr = TraceState::new(&a, vec![0.4, 0.2]).unwrap();
        let bc = basic_construction(&UnitalEmbedding::identity(&a), &tr, 1e-9).unwrap();
        assert_eq!(bc.a1().block_dims(), a.block_dims());
        assert!(bc.jones_projection.distance(&bc.a1().one()) < 1e-12);
    }

    #[test]
    fn markov_round_trip() {
        let a = MultiMatrix::new(vec![2, 1]).unwrap();
        let emb = UnitalEmbedding::scalars_into(&a);
        let mt = markov_trace_for(&emb).unwrap();
        let bc = basic_construction(&emb, &mt.trace_on(&a).unwrap(), 1e-9).unwrap();
        assert!(bc.is_markov);
        assert!((bc.tau - 0.2).abs() < 1e-12);
        let report =
            is_basic_construction_triple(&bc.lower, &bc.upper, &bc.extended_trace, 1e-9).unwrap();
        assert!(report.is_basic_construction, "{}", report.reason);
    }

    #[test]
    fn shape_violations_are_rejected() {
        let c2 = MultiMatrix::commutative(2).unwrap();
        let c4 = MultiMatrix::commutative(4).unwrap();
        let lower = UnitalEmbedding::scalars_into(&c2);
        let lambda = InclusionMatrix::from_rows(&[vec![1, 0], vec![1, 0], vec![0, 1], vec![0, 1]]).unwrap();
        let upper = UnitalEmbedding::from_multiplicities(c2.clone(), c4.clone(), &lambda).unwrap();
        let r = is_basic_construction_triple(&lower, &upper, &TraceState::uniform(&c4), 1e-9).unwrap();
        assert!(!r.is_basic_construction && !r.transpose_shape);
        let m2 = MultiMatrix::full(2).unwrap();
        let r = is_basic_construction_triple(
            &UnitalEmbedding::scalars_into(&m2),
            &UnitalEmbedding::identity(&m2),
            &TraceState::uniform(&m2),
            1e-9,
        )
        .unwrap();
        assert!(!r.is_basic_construction);
    }
}
