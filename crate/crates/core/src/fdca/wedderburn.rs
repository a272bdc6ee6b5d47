use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fdca::algebra::{AlgElem, MultiMatrix};
use crate::fdca::presentation::StarAlgebraPresentation;
use crate::linalg::{
    column_space, hermitian_eigen, max_abs, max_abs_vec, random_cvec, rank, real, CMat, CVec, C64,
};

const ATTEMPTS: usize = 5;

/// A *-isomorphism between a presentation and a multi-matrix algebra.
#[derive(Debug, Clone)]
pub struct Wedderburn {
    pub algebra: MultiMatrix,
    /// Columns are the images of the matrix units, in presentation coordinates.
    pub phi: CMat,
    pub phi_inv: CMat,
    /// Largest deviation of `phi` from a *-homomorphism on matrix units.
    pub residual: f64,
}

impl Wedderburn {
    pub fn to_presentation(&self, x: &AlgElem) -> CVec {
        &self.phi * x.to_coords()
    }

    pub fn from_presentation(&self, v: &CVec) -> AlgElem {
        self.algebra
            .element_from_coords(&(&self.phi_inv * v))
            .expect("phi_inv has algebra rows")
    }
}

/// Decomposes a semisimple *-algebra into matrix blocks sorted ascending.
///
/// The attached trace is used when present, otherwise the trace of the left
/// regular representation. Randomized steps are seeded by `seed` and retried
/// on degeneracy.
pub fn wedderburn(p: &StarAlgebraPresentation, seed: u64, tol: f64) -> Result<Wedderburn> {
    let d = p.dim();
    let gram = p.trace_gram();
    let (vals, vecs) = hermitian_eigen(&gram);
    let largest = vals.iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    if vals[0] <= 1e-10 * largest.max(1e-300) {
        return Err(Error::NotSemisimple);
    }
    let sqrt = &vecs
        * CMat::from_diagonal(&CVec::from_iterator(d, vals.iter().map(|v| real(v.sqrt()))))
        * vecs.adjoint();
    let sqrt_inv = &vecs
        * CMat::from_diagonal(&CVec::from_iterator(d, vals.iter().map(|v| real(1.0 / v.sqrt()))))
        * vecs.adjoint();
    let rank_tol = (tol * 100.0).max(1e-9);
    let center = p.center(rank_tol);
    let center_on = column_space(&(&sqrt * &center), rank_tol);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = String::new();
    for _ in 0..ATTEMPTS {
        match attempt(p, &sqrt, &sqrt_inv, &center, &center_on, rank_tol, tol, &mut rng) {
            Ok(w) => return Ok(w),
            Err(Error::NumericalDegeneracy(msg)) => last = msg,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NumericalDegeneracy(format!("block splitting failed after {ATTEMPTS} attempts: {last}")))
}

#[allow(clippy::too_many_arguments)]
fn attempt(
    p: &StarAlgebraPresentation,
    sqrt: &CMat,
    sqrt_inv: &CMat,
    center: &CMat,
    center_on: &CMat,
    rank_tol: f64,
    tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Wedderburn> {
    let d = p.dim();
    let c = center.ncols();
    let degenerate = |m: &str| Error::NumericalDegeneracy(m.to_string());

    let coeffs = random_cvec(rng, c);
    let z = center * coeffs;
    let z = (&z + p.star(&z)) * real(0.5);
    let hz = sqrt * p.left_mul_matrix(&z) * sqrt_inv;
    let reduced = center_on.adjoint() * hz * center_on;
    let (evals, evecs) = hermitian_eigen(&reduced);
    let scale = evals.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
    if evals.windows(2).any(|w| (w[1] - w[0]) < 1e-6 * scale) {
        return Err(degenerate("central element has repeated eigenvalues"));
    }

    let mut blocks: Vec<(usize, Vec<CVec>)> = Vec::with_capacity(c);
    for k in 0..c {
        let x = sqrt_inv * (center_on * evecs.column(k));
        let x2 = p.mul(&x, &x);
        let s = x.dotc(&x2) / x.dotc(&x);
        if s.norm() < 1e-12 {
            return Err(degenerate("central eigenvector squares to zero"));
        }
        let proj = &x / s;
        if max_abs_vec(&(p.mul(&proj, &proj) - &proj)) > 1e-6 {
            return Err(degenerate("central eigenvector is not a projection"));
        }
        let lp = p.left_mul_matrix(&proj);
        let r = rank(&lp, rank_tol);
        let n = (r as f64).sqrt().round() as usize;
        if n * n != r || n == 0 {
            return Err(degenerate("central projection does not cut out a square block"));
        }
        let units = matrix_units(p, &proj, n, sqrt, sqrt_inv, &lp, rank_tol, rng)?;
        blocks.push((n, units));
    }
    blocks.sort_by_key(|(n, _)| *n);
    let algebra = MultiMatrix::new(blocks.iter().map(|(n, _)| *n).collect())?;
    if algebra.dim() != d {
        return Err(degenerate("block dimensions do not add up"));
    }
    let cols: Vec<CVec> = blocks.into_iter().flat_map(|(_, u)| u).collect();
    let phi = CMat::from_columns(&cols);
    let phi_inv = phi.clone().try_inverse().ok_or_else(|| degenerate("matrix units are dependent"))?;

    let mut residual: f64 = 0.0;
    let units = algebra.basis();
    for (c1, u) in units.iter().enumerate() {
        let l = p.left_mul_matrix(&phi.column(c1).into_owned());
        let prod = l * &phi;
        for (c2, v) in units.iter().enumerate() {
            let expected = &phi * (u * v).to_coords();
            residual = residual.max(max_abs_vec(&(prod.column(c2) - expected)));
        }
        let star = p.star(&phi.column(c1).into_owned());
        residual = residual.max(max_abs_vec(&(star - &phi * u.adjoint().to_coords())));
    }
    let scale = max_abs(&phi).max(1.0);
    if residual > (tol * 1e3).max(1e-7) * scale * scale {
        return Err(degenerate("recovered matrix units fail the multiplication table"));
    }
    Ok(Wedderburn { algebra, phi, phi_inv, residual })
}

#[allow(clippy::too_many_arguments)]
fn matrix_units(
    p: &StarAlgebraPresentation,
    proj: &CVec,
    n: usize,
    sqrt: &CMat,
    sqrt_inv: &CMat,
    lp: &CMat,
    rank_tol: f64,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<CVec>> {
    let degenerate = |m: &str| Error::NumericalDegeneracy(m.to_string());
    if n == 1 {
        return Ok(vec![proj.clone()]);
    }
    let d = p.dim();
    let r = random_cvec(rng, d);
    let sa = &r + p.star(&r);
    let h = p.mul(&p.mul(proj, &sa), proj);
    let range = column_space(&(sqrt * lp * sqrt_inv), rank_tol);
    let hh = range.adjoint() * (sqrt * p.left_mul_matrix(&h) * sqrt_inv) * &range;
    let (evals, _) = hermitian_eigen(&hh);
    if evals.len() != n * n {
        return Err(degenerate("block range has the wrong dimension"));
    }
    let scale = evals.iter().fold(1e-300f64, |m, v| m.max(v.abs()));
    let means: Vec<f64> = evals.chunks(n).map(|ch| ch.iter().sum::<f64>() / n as f64).collect();
    for ch in evals.chunks(n) {
        if ch[n - 1] - ch[0] > 1e-6 * scale {
            return Err(degenerate("eigenvalue clusters are not separated"));
        }
    }
    if means.windows(2).any(|w| w[1] - w[0] < 1e-4 * scale) {
        return Err(degenerate("random element has close eigenvalues"));
    }
    let mut minimal = Vec::with_capacity(n);
    for i in 0..n {
        let mut e = proj.clone();
        for k in 0..n {
            if k != i {
                let he = p.mul(&h, &e);
                e = (he - &e * real(means[k])) / real(means[i] - means[k]);
            }
        }
        minimal.push(e);
    }
    let r2 = random_cvec(rng, d);
    let mut row0: Vec<CVec> = vec![minimal[0].clone()];
    for ej in minimal.iter().skip(1) {
        let f = p.mul(&p.mul(&minimal[0], &r2), ej);
        let ff = p.mul(&f, &p.star(&f));
        let cval = minimal[0].dotc(&ff) / minimal[0].dotc(&minimal[0]);
        if cval.re < 1e-10 {
            return Err(degenerate("off-diagonal matrix unit vanishes"));
        }
        row0.push(f / C64::new(cval.re.sqrt(), 0.0));
    }
    let col0: Vec<CVec> = row0.iter().map(|x| p.star(x)).collect();
    let mut units = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            let u = if i == 0 {
                row0[j].clone()
            } else if j == 0 {
                col0[i].clone()
            } else {
                p.mul(&col0[i], &row0[j])
            };
            units.push(u);
        }
    }
    Ok(units)
}
