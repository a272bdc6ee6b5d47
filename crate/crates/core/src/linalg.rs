//! Dense complex linear algebra helpers shared by every module.
//!
//! Everything is built on `nalgebra` with `Complex<f64>` scalars. Rank
//! decisions are relative: a singular value counts when it exceeds
//! `tol * max(1, largest singular value)`.

use nalgebra::{DMatrix, DVector};
use nalgebra::Complex;
use rand::Rng;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;

/// Default comparison tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;

#[inline]
pub fn cplx(re: f64, im: f64) -> C64 {
    Complex::new(re, im)
}

#[inline]
pub fn real(re: f64) -> C64 {
    Complex::new(re, 0.0)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_vec(v: &CVec) -> f64 {
    v.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Singular values of `a`, padded with zeros up to the column count so that
/// rank-deficient wide matrices report their full nullity.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return vec![0.0; a.ncols()];
    }
    let svd = a.clone().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.partial_cmp(x).unwrap());
    s.resize(a.ncols().max(s.len()), 0.0);
    s
}

fn threshold(largest: f64, tol: f64) -> f64 {
    tol * largest.max(1.0)
}

pub fn rank(a: &CMat, tol: f64) -> usize {
    if a.nrows() == 0 || a.ncols() == 0 {
        return 0;
    }
    let s = singular_values(a);
    let thr = threshold(s[0], tol);
    s.iter().filter(|&&x| x > thr).count()
}

/// Orthonormal basis (columns) of the null space of `a`.
pub fn null_space(a: &CMat, tol: f64) -> CMat {
    let n = a.ncols();
    if n == 0 {
        return CMat::zeros(0, 0);
    }
    if a.nrows() == 0 {
        return CMat::identity(n, n);
    }
    // Pad to at least square so the SVD returns a full right basis.
    let work = if a.nrows() < n {
        let mut p = CMat::zeros(n, n);
        p.view_mut((0, 0), (a.nrows(), n)).copy_from(a);
        p
    } else {
        a.clone()
    };
    let svd = work.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let s = &svd.singular_values;
    let largest = s.iter().fold(0.0f64, |m, &x| m.max(x));
    let thr = threshold(largest, tol);
    let cols: Vec<CVec> = (0..s.len())
        .filter(|&i| s[i] <= thr)
        .map(|i| v_t.row(i).adjoint())
        .collect();
    if cols.is_empty() {
        CMat::zeros(n, 0)
    } else {
        CMat::from_columns(&cols)
    }
}

/// Orthonormal basis (columns) of the column space of `a`.
pub fn column_space(a: &CMat, tol: f64) -> CMat {
    let m = a.nrows();
    if a.ncols() == 0 || m == 0 {
        return CMat::zeros(m, 0);
    }
    let svd = a.clone().svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let s = &svd.singular_values;
    let largest = s.iter().fold(0.0f64, |acc, &x| acc.max(x));
    let thr = threshold(largest, tol);
    let cols: Vec<CVec> = (0..s.len())
        .filter(|&i| s[i] > thr)
        .map(|i| u.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        CMat::zeros(m, 0)
    } else {
        CMat::from_columns(&cols)
    }
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let sym = (m + m.adjoint()) * real(0.5);
    let eig = sym.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = CMat::from_columns(
        &order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect::<Vec<_>>(),
    );
    (values, vectors)
}

/// `G^{-1/2}` for a Hermitian positive definite `G`; fails when the smallest
/// eigenvalue is below `tol` relative to the largest.
pub fn inverse_sqrt_pd(g: &CMat, tol: f64) -> Result<CMat> {
    let (vals, vecs) = hermitian_eigen(g);
    let largest = vals.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    if vals.is_empty() {
        return Ok(CMat::zeros(0, 0));
    }
    if vals[0] <= tol * largest.max(1e-300) {
        return Err(Error::SingularGram);
    }
    let d = CMat::from_diagonal(&CVec::from_iterator(
        vals.len(),
        vals.iter().map(|&v| real(1.0 / v.sqrt())),
    ));
    Ok(&vecs * d * vecs.adjoint())
}

/// Left inverse `(B^H B)^{-1} B^H` of a matrix with independent columns.
pub fn left_inverse(b: &CMat) -> Result<CMat> {
    let g = b.adjoint() * b;
    let inv = g.try_inverse().ok_or(Error::SingularGram)?;
    Ok(inv * b.adjoint())
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// True when the column spans of `a` and `b` coincide.
pub fn same_span(a: &CMat, b: &CMat, tol: f64) -> bool {
    let ra = rank(a, tol);
    let rb = rank(b, tol);
    if ra != rb {
        return false;
    }
    if ra == 0 {
        return true;
    }
    let joined = CMat::from_fn(a.nrows(), a.ncols() + b.ncols(), |i, j| {
        if j < a.ncols() {
            a[(i, j)]
        } else {
            b[(i, j - a.ncols())]
        }
    });
    rank(&joined, tol) == ra
}

pub fn random_cmat<R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| {
        cplx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

pub fn random_cvec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CVec {
    CVec::from_fn(n, |_, _| {
        cplx(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    })
}

/// A random unitary from the QR factorization of a random matrix.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> CMat {
    random_cmat(rng, n, n).qr().q()
}

/// Stack matrices with equal column counts vertically.
pub fn vstack(parts: &[CMat]) -> CMat {
    let cols = parts.first().map_or(0, |p| p.ncols());
    let rows: usize = parts.iter().map(|p| p.nrows()).sum();
    let mut out = CMat::zeros(rows, cols);
    let mut r = 0;
    for p in parts {
        out.view_mut((r, 0), (p.nrows(), cols)).copy_from(p);
        r += p.nrows();
    }
    out
}

/// Join column vectors into a matrix with `rows` rows (handles the empty case).
pub fn hstack_columns(rows: usize, cols: &[CVec]) -> CMat {
    if cols.is_empty() {
        CMat::zeros(rows, 0)
    } else {
        CMat::from_columns(cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn null_space_of_wide_matrix() {
        let a = CMat::from_row_slice(1, 3, &[real(1.0), real(1.0), real(0.0)]);
        let ns = null_space(&a, 1e-12);
        assert_eq!(ns.ncols(), 2);
        assert!(max_abs(&(&a * &ns)) < 1e-12);
    }

    #[test]
    fn rank_and_column_space_agree() {
        let a = CMat::from_row_slice(
            3,
            2,
            &[real(1.0), real(2.0), real(2.0), real(4.0), real(0.0), real(0.0)],
        );
        assert_eq!(rank(&a, 1e-12), 1);
        assert_eq!(column_space(&a, 1e-12).ncols(), 1);
    }

    #[test]
    fn inverse_sqrt_rejects_singular() {
        let g = CMat::from_diagonal(&CVec::from_vec(vec![real(1.0), real(0.0)]));
        assert_eq!(inverse_sqrt_pd(&g, 1e-12), Err(Error::SingularGram));
    }
}
