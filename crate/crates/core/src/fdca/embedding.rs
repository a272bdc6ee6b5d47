use std::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::fdca::algebra::{AlgElem, MultiMatrix};
use crate::linalg::{column_space, hstack_columns, max_abs, rank, real, CMat, CVec, DEFAULT_TOL};

/// Multiplicity matrix of a unital inclusion `B ⊂ A`: entry `(i, j)` counts
/// the copies of block `j` of `B` inside block `i` of `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InclusionMatrix {
    rows: usize,
    cols: usize,
    data: Vec<usize>,
}

impl InclusionMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<usize>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "inclusion matrix {rows}x{cols} needs {} entries, got {}",
                rows * cols,
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<usize>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::ShapeMismatch("ragged inclusion matrix".into()));
        }
        Self::new(r, c, rows.concat())
    }

    /// An `n × 1` column, e.g. the inclusion `ℂ ⊂ A` has the block dims of `A`.
    pub fn column(entries: &[usize]) -> Result<Self> {
        Self::new(entries.len(), 1, entries.to_vec())
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.data[i * self.cols + j]
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut data = vec![0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.get(i, j);
            }
        }
        Self { rows: self.cols, cols: self.rows, data }
    }

    pub fn to_f64(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j) as f64)
    }

    /// Squared operator norm `‖Λ‖²`, the largest eigenvalue of `ΛΛᵗ`.
    pub fn norm_squared(&self) -> f64 {
        let m = self.to_f64();
        let g = &m * m.transpose();
        g.symmetric_eigen().eigenvalues.iter().fold(0.0f64, |a, &b| a.max(b))
    }

    /// Connectivity of the bipartite Bratteli graph (edge when `Λ_ij > 0`).
    pub fn is_connected(&self) -> bool {
        let total = self.rows + self.cols;
        let mut seen = vec![false; total];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            let neighbours: Vec<usize> = if v < self.rows {
                (0..self.cols).filter(|&j| self.get(v, j) > 0).map(|j| self.rows + j).collect()
            } else {
                let j = v - self.rows;
                (0..self.rows).filter(|&i| self.get(i, j) > 0).collect()
            };
            for w in neighbours {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// A permutation `π` with `self.row(π[j]) == other.row(j)` for every `j`,
    /// when the rows of the two matrices agree as multisets.
    pub fn row_permutation_to(&self, other: &InclusionMatrix) -> Option<Vec<usize>> {
        if self.rows != other.rows || self.cols != other.cols {
            return None;
        }
        let mut used = vec![false; self.rows];
        let mut perm = Vec::with_capacity(self.rows);
        for j in 0..other.rows {
            let target = other.row(j);
            let i = (0..self.rows).find(|&i| !used[i] && self.row(i) == target)?;
            used[i] = true;
            perm.push(i);
        }
        Some(perm)
    }
}

impl fmt::Display for InclusionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = (0..self.rows)
            .map(|i| {
                self.row(i).iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
            })
            .collect();
        write!(f, "[{}]", rows.join("; "))
    }
}

/// A unital injective *-homomorphism `B → A`, stored as a linear map on
/// coordinates. The inclusion matrix is derived from the map.
#[derive(Debug, Clone)]
pub struct UnitalEmbedding {
    source: MultiMatrix,
    target: MultiMatrix,
    map: CMat,
    inclusion: InclusionMatrix,
}

impl UnitalEmbedding {
    /// Validates unitality, multiplicativity, *-preservation and injectivity
    /// on the matrix units of the source.
    pub fn from_matrix(source: MultiMatrix, target: MultiMatrix, map: CMat, tol: f64) -> Result<Self> {
        if map.nrows() != target.dim() || map.ncols() != source.dim() {
            return Err(Error::ShapeMismatch(format!(
                "embedding matrix must be {}x{}, got {}x{}",
                target.dim(),
                source.dim(),
                map.nrows(),
                map.ncols()
            )));
        }
        let apply = |x: &AlgElem| -> AlgElem {
            target.element_from_coords(&(&map * x.to_coords())).expect("shape checked")
        };
        let unit_res = apply(&source.one()).distance(&target.one());
        if unit_res > tol {
            return Err(Error::NotUnital { residual: unit_res });
        }
        let images: Vec<AlgElem> = source.basis().iter().map(apply).collect();
        let mut hom_res: f64 = 0.0;
        let mut star_res: f64 = 0.0;
        for c1 in 0..source.dim() {
            let (b1, i1, j1) = source.locate(c1);
            let adj = source.coord(b1, j1, i1);
            star_res = star_res.max(images[c1].adjoint().distance(&images[adj]));
            for c2 in 0..source.dim() {
                let (b2, i2, j2) = source.locate(c2);
                let prod = &images[c1] * &images[c2];
                let expected = if b1 == b2 && j1 == i2 {
                    images[source.coord(b1, i1, j2)].clone()
                } else {
                    target.zero()
                };
                hom_res = hom_res.max(prod.distance(&expected));
            }
        }
        if hom_res > tol {
            return Err(Error::NotAHomomorphism { residual: hom_res });
        }
        if star_res > tol {
            return Err(Error::NotStarPreserving { residual: star_res });
        }
        let r = rank(&map, tol);
        if r < source.dim() {
            return Err(Error::NotInjective { rank: r, expected: source.dim() });
        }
        let inclusion = derive_inclusion(&source, &target, &images, tol)?;
        Ok(Self { source, target, map, inclusion })
    }

    /// Builds the map from its values on matrix units.
    pub fn from_fn(
        source: MultiMatrix,
        target: MultiMatrix,
        f: impl Fn(&AlgElem) -> AlgElem,
        tol: f64,
    ) -> Result<Self> {
        let cols: Vec<CVec> = source.basis().iter().map(|x| f(x).to_coords()).collect();
        for c in &cols {
            if c.len() != target.dim() {
                return Err(Error::ShapeMismatch("image does not lie in the target".into()));
            }
        }
        let map = hstack_columns(target.dim(), &cols);
        Self::from_matrix(source, target, map, tol)
    }

    /// The standard embedding with the given multiplicities: block `i` of the
    /// target is `⊕_j (I_{Λ_ij} ⊗ b_j)` with `j` ascending.
    pub fn from_multiplicities(
        source: MultiMatrix,
        target: MultiMatrix,
        lambda: &InclusionMatrix,
    ) -> Result<Self> {
        if lambda.nrows() != target.num_blocks() || lambda.ncols() != source.num_blocks() {
            return Err(Error::ShapeMismatch(format!(
                "inclusion matrix must be {}x{}",
                target.num_blocks(),
                source.num_blocks()
            )));
        }
        for i in 0..lambda.nrows() {
            let size: usize =
                (0..lambda.ncols()).map(|j| lambda.get(i, j) * source.block_dims()[j]).sum();
            if size != target.block_dims()[i] {
                return Err(Error::ShapeMismatch(format!(
                    "row {i}: Σ_j Λ_ij n_j = {size} but target block has size {}",
                    target.block_dims()[i]
                )));
            }
        }
        let mut map = CMat::zeros(target.dim(), source.dim());
        for c in 0..source.dim() {
            let (bj, p, q) = source.locate(c);
            for i in 0..target.num_blocks() {
                let mut offset = 0;
                for j in 0..source.num_blocks() {
                    let nj = source.block_dims()[j];
                    for r in 0..lambda.get(i, j) {
                        if j == bj {
                            let base = offset + r * nj;
                            map[(target.coord(i, base + p, base + q), c)] = real(1.0);
                        }
                    }
                    offset += lambda.get(i, j) * nj;
                }
            }
        }
        Ok(Self { source, target, map, inclusion: lambda.clone() })
    }

    pub fn identity(algebra: &MultiMatrix) -> Self {
        let k = algebra.num_blocks();
        let mut data = vec![0; k * k];
        for i in 0..k {
            data[i * k + i] = 1;
        }
        let lambda = InclusionMatrix::new(k, k, data).expect("square identity");
        Self::from_multiplicities(algebra.clone(), algebra.clone(), &lambda)
            .expect("identity embedding is valid")
    }

    /// The unital embedding of the scalars.
    pub fn scalars_into(target: &MultiMatrix) -> Self {
        let lambda = InclusionMatrix::column(target.block_dims()).expect("nonempty");
        Self::from_multiplicities(MultiMatrix::scalars(), target.clone(), &lambda)
            .expect("scalar embedding is valid")
    }

    pub fn source(&self) -> &MultiMatrix {
        &self.source
    }

    pub fn target(&self) -> &MultiMatrix {
        &self.target
    }

    pub fn matrix(&self) -> &CMat {
        &self.map
    }

    pub fn inclusion_matrix(&self) -> &InclusionMatrix {
        &self.inclusion
    }

    pub fn is_connected(&self) -> bool {
        self.inclusion.is_connected()
    }

    pub fn apply(&self, x: &AlgElem) -> AlgElem {
        self.target
            .element_from_coords(&(&self.map * x.to_coords()))
            .expect("embedding matrix has target rows")
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &UnitalEmbedding) -> Result<UnitalEmbedding> {
        if self.target != next.source {
            return Err(Error::IncompatibleTower(format!(
                "cannot compose {} → {} with {} → {}",
                self.source, self.target, next.source, next.target
            )));
        }
        let map = &next.map * &self.map;
        let images: Vec<AlgElem> = (0..self.source.dim())
            .map(|c| next.target.element_from_coords(&map.column(c).into_owned()).unwrap())
            .collect();
        let inclusion = derive_inclusion(&self.source, &next.target, &images, DEFAULT_TOL)?;
        Ok(Self { source: self.source.clone(), target: next.target.clone(), map, inclusion })
    }

    /// The tensor product `ι₁ ⊗ ι₂ : B₁⊗B₂ → A₁⊗A₂`.
    pub fn tensor(&self, other: &UnitalEmbedding, tol: f64) -> Result<UnitalEmbedding> {
        let source = self.source.tensor(&other.source);
        let target = self.target.tensor(&other.target);
        let k2 = other.source.num_blocks();
        let map_images: Vec<CVec> = (0..source.dim())
            .map(|c| {
                let (b, i, j) = source.locate(c);
                let (b1, b2) = (b / k2, b % k2);
                let n2 = other.source.block_dims()[b2];
                let x = self.apply(&self.source.matrix_unit(b1, i / n2, j / n2));
                let y = other.apply(&other.source.matrix_unit(b2, i % n2, j % n2));
                x.tensor(&y).to_coords()
            })
            .collect();
        Self::from_matrix(source, target.clone(), hstack_columns(target.dim(), &map_images), tol)
    }

    /// `ι(B)` as a column basis in target coordinates.
    pub fn image_basis(&self) -> &CMat {
        &self.map
    }

    /// Max-entry distance between two embeddings with the same source and target.
    pub fn distance(&self, other: &UnitalEmbedding) -> f64 {
        if self.source != other.source || self.target != other.target {
            return f64::INFINITY;
        }
        max_abs(&(&self.map - &other.map))
    }

    /// Unitaries `V_i` with `ι(b)_i = V_i D_i(b) V_i*`, where `D_i` is the
    /// standard embedding of [`UnitalEmbedding::from_multiplicities`].
    /// Columns of `V_i` are ordered by source block, copy, then row.
    pub fn adapted_frames(&self, tol: f64) -> Result<Vec<CMat>> {
        let src = &self.source;
        let mut frames = Vec::with_capacity(self.target.num_blocks());
        let units: Vec<Vec<AlgElem>> = (0..src.num_blocks())
            .map(|j| (0..src.block_dims()[j]).map(|s| self.apply(&src.matrix_unit(j, s, 0))).collect())
            .collect();
        for i in 0..self.target.num_blocks() {
            let ni = self.target.block_dims()[i];
            let mut cols: Vec<CVec> = Vec::with_capacity(ni);
            for j in 0..src.num_blocks() {
                let q = &units[j][0].blocks[i];
                let range = column_space(q, 1e-8);
                if range.ncols() != self.inclusion.get(i, j) {
                    return Err(Error::NumericalDegeneracy(format!(
                        "range of minimal projection has rank {} but multiplicity is {}",
                        range.ncols(),
                        self.inclusion.get(i, j)
                    )));
                }
                for r in 0..range.ncols() {
                    let w = range.column(r).into_owned();
                    for unit in &units[j] {
                        cols.push(&unit.blocks[i] * &w);
                    }
                }
            }
            let v = hstack_columns(ni, &cols);
            let res = max_abs(&(v.adjoint() * &v - CMat::identity(ni, ni)));
            if res > tol.max(1e-8) {
                return Err(Error::NotUnitary { residual: res });
            }
            frames.push(v);
        }
        Ok(frames)
    }
}

fn derive_inclusion(
    source: &MultiMatrix,
    target: &MultiMatrix,
    images: &[AlgElem],
    tol: f64,
) -> Result<InclusionMatrix> {
    let k_a = target.num_blocks();
    let k_b = source.num_blocks();
    let mut data = vec![0usize; k_a * k_b];
    for j in 0..k_b {
        let nj = source.block_dims()[j];
        // ι(p_j) = Σ_s ι(e^{(j)}_{ss})
        let mut p = target.zero();
        for s in 0..nj {
            p = &p + &images[source.coord(j, s, s)];
        }
        for i in 0..k_a {
            let rk = p.blocks[i].trace().re;
            let mult = rk / nj as f64;
            let rounded = mult.round();
            if (mult - rounded).abs() > 1e-6_f64.max(tol) || rounded < 0.0 {
                return Err(Error::NotAHomomorphism { residual: (mult - rounded).abs() });
            }
            data[i * k_b + j] = rounded as usize;
        }
    }
    let lambda = InclusionMatrix::new(k_a, k_b, data)?;
    for i in 0..k_a {
        let size: usize = (0..k_b).map(|j| lambda.get(i, j) * source.block_dims()[j]).sum();
        if size != target.block_dims()[i] {
            return Err(Error::NotUnital { residual: (size as f64 - target.block_dims()[i] as f64).abs() });
        }
    }
    Ok(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::cplx;

    fn diag_m2() -> UnitalEmbedding {
        let b = MultiMatrix::commutative(2).unwrap();
        let a = MultiMatrix::full(2).unwrap();
        UnitalEmbedding::from_fn(
            b,
            a,
            |x| {
                let mut m = CMat::zeros(2, 2);
                m[(0, 0)] = x.blocks[0][(0, 0)];
                m[(1, 1)] = x.blocks[1][(0, 0)];
                AlgElem::from_blocks(vec![m])
            },
            1e-12,
        )
        .unwrap()
    }

    #[test]
    fn scalars_into_commutative_is_column_of_ones() {
        let e = UnitalEmbedding::scalars_into(&MultiMatrix::commutative(4).unwrap());
        assert_eq!(e.inclusion_matrix().rows(), vec![vec![1]; 4]);
    }

    #[test]
    fn scalars_into_m2_plus_c() {
        let e = UnitalEmbedding::scalars_into(&MultiMatrix::new(vec![2, 1]).unwrap());
        assert_eq!(e.inclusion_matrix().rows(), vec![vec![2], vec![1]]);
    }

    #[test]
    fn m2_tensor_one_inside_m2_tensor_c2() {
        // M₂⊗1 ⊂ M₂⊗ℂ², derived from ranks of minimal central projections.
        let m2 = MultiMatrix::full(2).unwrap();
        let c2 = MultiMatrix::commutative(2).unwrap();
        let target = m2.tensor(&c2);
        let e = UnitalEmbedding::from_fn(m2.clone(), target, |x| x.tensor(&c2.one()), 1e-12).unwrap();
        assert_eq!(e.inclusion_matrix().rows(), vec![vec![1], vec![1]]);
    }

    #[test]
    fn connectivity_examples() {
        let c = MultiMatrix::scalars();
        let a = MultiMatrix::new(vec![2, 1]).unwrap();
        assert!(UnitalEmbedding::scalars_into(&a).is_connected());
        let c2 = MultiMatrix::commutative(2).unwrap();
        assert!(!UnitalEmbedding::identity(&c2).is_connected());
        assert!(diag_m2().is_connected());
        let _ = c;
    }

    #[test]
    fn unitality_identity_holds() {
        let b = MultiMatrix::new(vec![1, 2]).unwrap();
        let a = MultiMatrix::new(vec![3, 5]).unwrap();
        let lambda = InclusionMatrix::from_rows(&[vec![1, 1], vec![1, 2]]).unwrap();
        let e = UnitalEmbedding::from_multiplicities(b.clone(), a.clone(), &lambda).unwrap();
        let check = UnitalEmbedding::from_matrix(b, a, e.matrix().clone(), 1e-12).unwrap();
        assert_eq!(check.inclusion_matrix(), &lambda);
    }

    #[test]
    fn rejects_non_homomorphism_and_non_unital() {
        let b = MultiMatrix::commutative(2).unwrap();
        let a = MultiMatrix::full(2).unwrap();
        let mut bad = diag_m2().matrix().clone();
        bad[(1, 0)] = cplx(0.5, 0.0);
        assert!(matches!(
            UnitalEmbedding::from_matrix(b.clone(), a.clone(), bad, 1e-9),
            Err(Error::NotAHomomorphism { .. }) | Err(Error::NotUnital { .. })
        ));
        let zero = CMat::zeros(4, 2);
        assert!(matches!(
            UnitalEmbedding::from_matrix(b, a, zero, 1e-9),
            Err(Error::NotUnital { .. })
        ));
    }

    #[test]
    fn adapted_frames_conjugate_to_standard_form() {
        let b = MultiMatrix::new(vec![1, 2]).unwrap();
        let a = MultiMatrix::new(vec![3]).unwrap();
        let lambda = InclusionMatrix::from_rows(&[vec![1, 1]]).unwrap();
        let std = UnitalEmbedding::from_multiplicities(b.clone(), a.clone(), &lambda).unwrap();
        // conjugate by a fixed unitary to get a non-standard embedding
        let theta = 0.7f64;
        let mut u = CMat::identity(3, 3);
        u[(0, 0)] = cplx(theta.cos(), 0.0);
        u[(0, 2)] = cplx(-theta.sin(), 0.0);
        u[(2, 0)] = cplx(theta.sin(), 0.0);
        u[(2, 2)] = cplx(theta.cos(), 0.0);
        let e = UnitalEmbedding::from_fn(
            b.clone(),
            a.clone(),
            |x| {
                let y = std.apply(x);
                AlgElem::from_blocks(vec![&u * &y.blocks[0] * u.adjoint()])
            },
            1e-12,
        )
        .unwrap();
        let frames = e.adapted_frames(1e-10).unwrap();
        for x in b.basis() {
            let lhs = &e.apply(&x).blocks[0];
            let rhs = &frames[0] * &std.apply(&x).blocks[0] * frames[0].adjoint();
            assert!(max_abs(&(lhs - rhs)) < 1e-10);
        }
    }

    #[test]
    fn row_permutation_matches_multisets() {
        let a = InclusionMatrix::from_rows(&[vec![1, 0], vec![1, 1]]).unwrap();
        let b = InclusionMatrix::from_rows(&[vec![1, 1], vec![1, 0]]).unwrap();
        assert_eq!(a.row_permutation_to(&b), Some(vec![1, 0]));
        let c = InclusionMatrix::from_rows(&[vec![2, 1], vec![1, 0]]).unwrap();
        assert_eq!(a.row_permutation_to(&c), None);
    }

    #[test]
    fn norm_squared_examples() {
        assert!((InclusionMatrix::column(&[2, 1]).unwrap().norm_squared() - 5.0).abs() < 1e-12);
        assert!((InclusionMatrix::column(&[1, 1, 1]).unwrap().norm_squared() - 3.0).abs() < 1e-12);
    }
}
