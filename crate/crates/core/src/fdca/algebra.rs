use std::fmt;
use std::ops::{Add, Mul, Sub};

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{kron, max_abs, random_cmat, real, CMat, CVec, C64};

/// A finite-dimensional C*-algebra `M_{n_1} ⊕ … ⊕ M_{n_k}`.
///
/// Coordinates are the concatenation of the blocks, each flattened
/// row-major, so the coordinate of the matrix unit `e^{(b)}_{ij}` is
/// `offset(b) + i * n_b + j`.
#[derive(Debug, Clone)]
pub struct MultiMatrix {
    dims: Vec<usize>,
    offsets: Vec<usize>,
    label: String,
}

impl PartialEq for MultiMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dims == other.dims
    }
}

impl Eq for MultiMatrix {}

impl MultiMatrix {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::InvalidAlgebra("at least one block is required".into()));
        }
        if let Some(pos) = dims.iter().position(|&n| n == 0) {
            return Err(Error::InvalidAlgebra(format!("block_dims[{pos}] must be positive")));
        }
        let mut offsets = Vec::with_capacity(dims.len());
        let mut acc = 0;
        for &n in &dims {
            offsets.push(acc);
            acc += n * n;
        }
        let label = dims
            .iter()
            .map(|&n| if n == 1 { "C".to_string() } else { format!("M{n}") })
            .collect::<Vec<_>>()
            .join("+");
        Ok(Self { dims, offsets, label })
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    /// The full matrix algebra `M_n`.
    pub fn full(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    /// The commutative algebra `ℂ^n`.
    pub fn commutative(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidAlgebra("ℂ^0 is not unital".into()));
        }
        Self::new(vec![1; n])
    }

    pub fn scalars() -> Self {
        Self::new(vec![1]).expect("ℂ is valid")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn block_dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn num_blocks(&self) -> usize {
        self.dims.len()
    }

    pub fn dim(&self) -> usize {
        self.dims.iter().map(|n| n * n).sum()
    }

    pub fn offset(&self, block: usize) -> usize {
        self.offsets[block]
    }

    pub fn coord(&self, block: usize, i: usize, j: usize) -> usize {
        self.offsets[block] + i * self.dims[block] + j
    }

    /// Inverse of [`MultiMatrix::coord`].
    pub fn locate(&self, coord: usize) -> (usize, usize, usize) {
        let b = match self.offsets.binary_search(&coord) {
            Ok(b) => b,
            Err(b) => b - 1,
        };
        let n = self.dims[b];
        let r = coord - self.offsets[b];
        (b, r / n, r % n)
    }

    pub fn is_commutative(&self) -> bool {
        self.dims.iter().all(|&n| n == 1)
    }

    pub fn is_simple(&self) -> bool {
        self.dims.len() == 1
    }

    pub fn zero(&self) -> AlgElem {
        AlgElem { blocks: self.dims.iter().map(|&n| CMat::zeros(n, n)).collect() }
    }

    pub fn one(&self) -> AlgElem {
        AlgElem { blocks: self.dims.iter().map(|&n| CMat::identity(n, n)).collect() }
    }

    pub fn matrix_unit(&self, block: usize, i: usize, j: usize) -> AlgElem {
        let mut x = self.zero();
        x.blocks[block][(i, j)] = real(1.0);
        x
    }

    /// Minimal central projection onto block `b`.
    pub fn central_projection(&self, block: usize) -> AlgElem {
        let mut x = self.zero();
        x.blocks[block] = CMat::identity(self.dims[block], self.dims[block]);
        x
    }

    /// Matrix units in coordinate order.
    pub fn basis(&self) -> Vec<AlgElem> {
        (0..self.dim())
            .map(|c| {
                let (b, i, j) = self.locate(c);
                self.matrix_unit(b, i, j)
            })
            .collect()
    }

    pub fn element_from_coords(&self, coords: &CVec) -> Result<AlgElem> {
        if coords.len() != self.dim() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coordinates, got {}",
                self.dim(),
                coords.len()
            )));
        }
        Ok(AlgElem {
            blocks: self
                .dims
                .iter()
                .enumerate()
                .map(|(b, &n)| CMat::from_fn(n, n, |i, j| coords[self.coord(b, i, j)]))
                .collect(),
        })
    }

    pub fn contains(&self, x: &AlgElem) -> bool {
        x.blocks.len() == self.dims.len()
            && x.blocks.iter().zip(&self.dims).all(|(m, &n)| m.nrows() == n && m.ncols() == n)
    }

    pub fn check_element(&self, x: &AlgElem) -> Result<()> {
        if self.contains(x) {
            Ok(())
        } else {
            Err(Error::ShapeMismatch(format!(
                "element with block shapes {:?} does not belong to {}",
                x.block_dims(),
                self.label
            )))
        }
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgElem {
        AlgElem { blocks: self.dims.iter().map(|&n| random_cmat(rng, n, n)).collect() }
    }

    pub fn random_self_adjoint<R: Rng + ?Sized>(&self, rng: &mut R) -> AlgElem {
        let x = self.random_element(rng);
        &x + &x.adjoint()
    }

    /// Tensor product; block `(i, j)` sits at position `i * k_other + j`.
    pub fn tensor(&self, other: &MultiMatrix) -> MultiMatrix {
        let dims = self
            .dims
            .iter()
            .flat_map(|&n| other.dims.iter().map(move |&m| n * m))
            .collect();
        MultiMatrix::new(dims)
            .expect("tensor of valid algebras is valid")
            .with_label(format!("({})⊗({})", self.label, other.label))
    }

    /// Matrix of left multiplication by `x` on coordinates.
    pub fn left_mul_matrix(&self, x: &AlgElem) -> CMat {
        self.block_operator(x, |xb, n| kron(xb, &CMat::identity(n, n)))
    }

    /// Matrix of right multiplication by `x` on coordinates.
    pub fn right_mul_matrix(&self, x: &AlgElem) -> CMat {
        self.block_operator(x, |xb, n| kron(&CMat::identity(n, n), &xb.transpose()))
    }

    fn block_operator(&self, x: &AlgElem, f: impl Fn(&CMat, usize) -> CMat) -> CMat {
        let d = self.dim();
        let mut out = CMat::zeros(d, d);
        for (b, &n) in self.dims.iter().enumerate() {
            let off = self.offsets[b];
            out.view_mut((off, off), (n * n, n * n)).copy_from(&f(&x.blocks[b], n));
        }
        out
    }
}

impl fmt::Display for MultiMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

/// An element of a [`MultiMatrix`] algebra, stored block by block.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgElem {
    pub blocks: Vec<CMat>,
}

impl AlgElem {
    pub fn from_blocks(blocks: Vec<CMat>) -> Self {
        Self { blocks }
    }

    /// Element of `ℂ^n` with the given entries.
    pub fn diagonal(entries: &[C64]) -> Self {
        Self { blocks: entries.iter().map(|&z| CMat::from_element(1, 1, z)).collect() }
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.nrows()).collect()
    }

    pub fn to_coords(&self) -> CVec {
        let len: usize = self.blocks.iter().map(|b| b.nrows() * b.ncols()).sum();
        let mut v = CVec::zeros(len);
        let mut k = 0;
        for b in &self.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    v[k] = b[(i, j)];
                    k += 1;
                }
            }
        }
        v
    }

    pub fn adjoint(&self) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b.adjoint()).collect() }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { blocks: self.blocks.iter().map(|b| b * z).collect() }
    }

    /// Unnormalized trace of each block.
    pub fn block_traces(&self) -> Vec<C64> {
        self.blocks.iter().map(|b| b.trace()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.blocks.iter().fold(0.0, |m, b| m.max(max_abs(b)))
    }

    pub fn distance(&self, other: &AlgElem) -> f64 {
        (self - other).max_abs()
    }

    /// Elementary tensor `self ⊗ other` inside the tensor product algebra.
    pub fn tensor(&self, other: &AlgElem) -> AlgElem {
        AlgElem {
            blocks: self
                .blocks
                .iter()
                .flat_map(|x| other.blocks.iter().map(move |y| kron(x, y)))
                .collect(),
        }
    }
}

impl Add for &AlgElem {
    type Output = AlgElem;
    fn add(self, rhs: &AlgElem) -> AlgElem {
        AlgElem { blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &AlgElem {
    type Output = AlgElem;
    fn sub(self, rhs: &AlgElem) -> AlgElem {
        AlgElem { blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a - b).collect() }
    }
}

impl Mul for &AlgElem {
    type Output = AlgElem;
    fn mul(self, rhs: &AlgElem) -> AlgElem {
        AlgElem { blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a * b).collect() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rejects_empty_and_zero_blocks() {
        assert!(MultiMatrix::new(vec![]).is_err());
        assert!(MultiMatrix::new(vec![2, 0]).is_err());
    }

    #[test]
    fn dimension_is_sum_of_squares() {
        let a = MultiMatrix::new(vec![2, 1, 3]).unwrap();
        assert_eq!(a.dim(), 14);
        assert_eq!(a.basis().len(), 14);
        for c in 0..a.dim() {
            let (b, i, j) = a.locate(c);
            assert_eq!(a.coord(b, i, j), c);
        }
    }

    #[test]
    fn multiplication_operators_match_products() {
        let a = MultiMatrix::new(vec![2, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = a.random_element(&mut rng);
        let y = a.random_element(&mut rng);
        let lx = a.left_mul_matrix(&x) * y.to_coords();
        let ry = a.right_mul_matrix(&y) * x.to_coords();
        let xy = (&x * &y).to_coords();
        assert!(crate::linalg::max_abs_vec(&(lx - &xy)) < 1e-12);
        assert!(crate::linalg::max_abs_vec(&(ry - xy)) < 1e-12);
    }

    #[test]
    fn adjoint_is_involutive_anti_homomorphism() {
        let a = MultiMatrix::new(vec![3, 2]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let x = a.random_element(&mut rng);
            let y = a.random_element(&mut rng);
            assert!(x.adjoint().adjoint().distance(&x) < 1e-14);
            let lhs = (&x * &y).adjoint();
            let rhs = &y.adjoint() * &x.adjoint();
            assert!(lhs.distance(&rhs) < 1e-12);
            let z = crate::linalg::cplx(0.3, -1.2);
            assert!(x.scale(z).adjoint().distance(&x.adjoint().scale(z.conj())) < 1e-14);
        }
    }
}
