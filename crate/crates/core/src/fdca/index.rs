use crate::fdca::embedding::InclusionMatrix;
use crate::fdca::trace::TraceState;

/// Watatani index of a trace on `A` over `ℂ`: the central element with value
/// `n_i / t_i` on block `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct WatataniIndex {
    pub values: Vec<f64>,
    pub is_scalar: bool,
    pub scalar: Option<f64>,
}

pub fn watatani_index(trace: &TraceState, tol: f64) -> WatataniIndex {
    let values: Vec<f64> =
        trace.block_dims().iter().zip(trace.weights()).map(|(&n, &t)| n as f64 / t).collect();
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    let is_scalar = max - min <= tol * max.max(1.0);
    let scalar = is_scalar.then(|| values.iter().sum::<f64>() / values.len() as f64);
    WatataniIndex { values, is_scalar, scalar }
}

/// Outcome of [`depth_from_tower`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Finite(usize),
    /// No qualifying level among the matrices supplied.
    Undetermined,
}

/// Depth of an inclusion from the inclusion matrices `Λ_0, Λ_1, …` of its
/// relative-commutant tower `N′∩M_k ⊂ N′∩M_{k+1}` and the index `β`.
///
/// Depth is 1 when `β = 1`. Otherwise it is the least `k ≥ 2` such that
/// `‖Λ_{k−2}‖² = β` and, when `Λ_{k−1}` is supplied, `Λ_{k−1}` is the
/// transpose of `Λ_{k−2}` up to a permutation of rows.
pub fn depth_from_tower(matrices: &[InclusionMatrix], beta: f64, tol: f64) -> Depth {
    if (beta - 1.0).abs() <= tol * beta.max(1.0) {
        return Depth::Finite(1);
    }
    for (k2, lam) in matrices.iter().enumerate() {
        if (lam.norm_squared() - beta).abs() > tol.max(1e-9) * beta.max(1.0) * 10.0 {
            continue;
        }
        if let Some(next) = matrices.get(k2 + 1) {
            if next.row_permutation_to(&lam.transpose()).is_none() {
                continue;
            }
        }
        return Depth::Finite(k2 + 2);
    }
    Depth::Undetermined
}

/// `[M:N] = |G| · dim(N′∩M)`.
pub fn index_formula(weyl_order: u64, relcom_dim: u64) -> u64 {
    weyl_order * relcom_dim
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConsistencyReport {
    pub consistent: bool,
    /// `|G| = index / dim(N′∩M)` when integral.
    pub weyl_order: Option<u64>,
    pub index_is_prime: bool,
    pub reason: String,
}

fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| !n.is_multiple_of(d))
}

fn is_square(n: u64) -> bool {
    let r = (n as f64).sqrt().round() as u64;
    (r.saturating_sub(1)..=r + 1).any(|s| s * s == n)
}

/// Tests an `(index, dim(N′∩M))` pair against the index formula.
///
/// When `|G| = 1` and the relative commutant is nontrivial, the index equals
/// `dim(N′∩M)`, which forces `N′∩M ≅ M_n` and an index `n²`; a non-square
/// index (in particular a prime one) is a contradiction.
pub fn consistency_check(index: u64, relcom_dim: u64) -> ConsistencyReport {
    let index_is_prime = is_prime(index);
    if relcom_dim == 0 || index == 0 {
        return ConsistencyReport {
            consistent: false,
            weyl_order: None,
            index_is_prime,
            reason: "index and relative commutant dimension must be positive".into(),
        };
    }
    if !index.is_multiple_of(relcom_dim) {
        return ConsistencyReport {
            consistent: false,
            weyl_order: None,
            index_is_prime,
            reason: format!("dim(N′∩M) = {relcom_dim} does not divide the index {index}"),
        };
    }
    let weyl = index / relcom_dim;
    if weyl == 1 && relcom_dim > 1 && !is_square(index) {
        return ConsistencyReport {
            consistent: false,
            weyl_order: Some(1),
            index_is_prime,
            reason: format!(
                "[M:N] = dim(N′∩M) = {index} forces N′∩M ≅ M_n with index n², but {index} is not a perfect square"
            ),
        };
    }
    ConsistencyReport {
        consistent: true,
        weyl_order: Some(weyl),
        index_is_prime,
        reason: format!("|G| = {weyl}, dim(N′∩M) = {relcom_dim}"),
    }
}
