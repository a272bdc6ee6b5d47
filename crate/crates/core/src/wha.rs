//! Weak Hopf C*-algebras given by structure tensors.
//!
//! Coordinates follow [`StarAlgebraPresentation`]. The comultiplication is a
//! `d² × d` matrix with `Δ(e_k) = Σ Δ[(i·d + j), k] e_i ⊗ e_j`, the counit a
//! vector with `ε(x) = Σ εᵢ xᵢ`, and the antipode a `d × d` matrix. Every
//! axiom is multilinear, so the checks run on basis elements only.

use std::fmt;

use crate::error::{Error, Result};
use crate::fdca::{relative_commutant, wedderburn, StarAlgebraPresentation, UnitalEmbedding};
use crate::fdca::{MultiMatrix, Subalgebra};
use crate::linalg::{max_abs, max_abs_vec, null_space, real, CMat, CVec, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// How far an instance has been verified.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Certification {
    Pending,
    Failed,
    WeakBialgebra,
    WeakHopf,
    WeakKac,
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Certification::Pending => "pending",
            Certification::Failed => "failed",
            Certification::WeakBialgebra => "weak bialgebra",
            Certification::WeakHopf => "weak Hopf",
            Certification::WeakKac => "weak Kac",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone)]
pub struct WeakHopfAlgebra {
    algebra: StarAlgebraPresentation,
    delta: CMat,
    eps: CVec,
    antipode: CMat,
    status: Certification,
}

/// Max residual per weak bialgebra axiom.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BialgebraReport {
    pub algebra: f64,
    pub multiplicative: f64,
    pub counit_first: f64,
    pub counit_second: f64,
    pub unit_left: f64,
    pub unit_right: f64,
    pub coassociative: f64,
    pub counit_law: f64,
    pub star_preserving: f64,
}

impl BialgebraReport {
    pub fn max(&self) -> f64 {
        [
            self.algebra,
            self.multiplicative,
            self.counit_first,
            self.counit_second,
            self.unit_left,
            self.unit_right,
            self.coassociative,
            self.counit_law,
            self.star_preserving,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }

    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("algebra", self.algebra),
            ("comultiplication multiplicative", self.multiplicative),
            ("counit eps(xyz) = eps(xy1) eps(y2z)", self.counit_first),
            ("counit eps(xyz) = eps(xy2) eps(y1z)", self.counit_second),
            ("unit D2(1) = (D(1)x1)(1xD(1))", self.unit_left),
            ("unit D2(1) = (1xD(1))(D(1)x1)", self.unit_right),
            ("coassociativity", self.coassociative),
            ("counit law", self.counit_law),
            ("comultiplication *-preserving", self.star_preserving),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntipodeReport {
    pub target: f64,
    pub source: f64,
    pub sandwich: f64,
}

impl AntipodeReport {
    pub fn max(&self) -> f64 {
        self.target.max(self.source).max(self.sandwich)
    }

    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("x1 S(x2) = eps(1_1 x) 1_2", self.target),
            ("S(x1) x2 = 1_1 eps(x 1_2)", self.source),
            ("S(x1) x2 S(x3) = S(x)", self.sandwich),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KacReport {
    pub involutive: f64,
    pub star_preserving: f64,
}

impl KacReport {
    pub fn max(&self) -> f64 {
        self.involutive.max(self.star_preserving)
    }

    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![("S^2 = id", self.involutive), ("S(x*) = S(x)*", self.star_preserving)]
    }
}

/// Nonzero structure constants grouped by the pair `(i, j)`.
fn sparse_products(p: &StarAlgebraPresentation) -> Vec<Vec<(usize, C64)>> {
    let d = p.dim();
    let s = p.structure();
    (0..d * d)
        .map(|ij| (0..d).filter(|&l| s[ij * d + l] != ZERO).map(|l| (l, s[ij * d + l])).collect())
        .collect()
}

fn nonzero3(v: &[C64], d: usize) -> Vec<(usize, usize, usize, C64)> {
    v.iter()
        .enumerate()
        .filter(|(_, z)| **z != ZERO)
        .map(|(k, z)| (k / (d * d), (k / d) % d, k % d, *z))
        .collect()
}

fn nonzero2(v: &[C64], d: usize) -> Vec<(usize, usize, C64)> {
    v.iter().enumerate().filter(|(_, z)| **z != ZERO).map(|(k, z)| (k / d, k % d, *z)).collect()
}

impl WeakHopfAlgebra {
    pub fn new(algebra: StarAlgebraPresentation, delta: CMat, eps: CVec, antipode: CMat) -> Result<Self> {
        let d = algebra.dim();
        if delta.nrows() != d * d || delta.ncols() != d {
            return Err(Error::ShapeMismatch(format!("Delta must be {}x{d}", d * d)));
        }
        if eps.len() != d {
            return Err(Error::ShapeMismatch(format!("eps needs {d} values")));
        }
        if antipode.nrows() != d || antipode.ncols() != d {
            return Err(Error::ShapeMismatch(format!("S must be {d}x{d}")));
        }
        Ok(Self { algebra, delta, eps, antipode, status: Certification::Pending })
    }

    pub fn algebra(&self) -> &StarAlgebraPresentation {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn delta(&self) -> &CMat {
        &self.delta
    }

    pub fn eps(&self) -> &CVec {
        &self.eps
    }

    pub fn antipode(&self) -> &CMat {
        &self.antipode
    }

    pub fn status(&self) -> Certification {
        self.status
    }

    /// `Δ(x)` as a `d × d` coefficient matrix.
    pub fn coproduct(&self, x: &CVec) -> CMat {
        let d = self.dim();
        let v = &self.delta * x;
        CMat::from_fn(d, d, |i, j| v[i * d + j])
    }

    pub fn counit(&self, x: &CVec) -> C64 {
        self.eps.dot(x)
    }

    /// `Δ(1)`.
    pub fn delta_one(&self) -> CMat {
        self.coproduct(self.algebra.unit())
    }

    /// `F[x, k] = ε(e_x e_k)`.
    fn counit_form(&self) -> CMat {
        let d = self.dim();
        CMat::from_fn(d, d, |x, k| {
            (0..d).map(|l| self.algebra.constant(x, k, l) * self.eps[l]).sum()
        })
    }

    /// Runs every check and records the strongest structure that holds.
    pub fn certify(mut self, tol: f64) -> Self {
        let b = verify_weak_bialgebra(&self);
        self.status = if b.max() > tol {
            Certification::Failed
        } else if verify_antipode(&self).max() > tol {
            Certification::WeakBialgebra
        } else if verify_weak_kac(&self).max() > tol {
            Certification::WeakHopf
        } else {
            Certification::WeakKac
        };
        self
    }

    pub fn require_kac(&self) -> Result<()> {
        if self.status == Certification::WeakKac {
            Ok(())
        } else {
            Err(Error::InvalidStructure(format!("weak Kac algebra required, instance is {}", self.status)))
        }
    }
}

/// Product of two elements of `A ⊗ A` given as `d × d` coefficient matrices.
fn tensor2_mul(sp: &[Vec<(usize, C64)>], d: usize, x: &CMat, y: &CMat) -> CMat {
    let xs = nonzero2(x.transpose().as_slice(), d);
    let ys = nonzero2(y.transpose().as_slice(), d);
    let mut out = CMat::zeros(d, d);
    for &(a, b, cx) in &xs {
        for &(a2, b2, cy) in &ys {
            let c = cx * cy;
            for &(p, m1) in &sp[a * d + a2] {
                for &(q, m2) in &sp[b * d + b2] {
                    out[(p, q)] += c * m1 * m2;
                }
            }
        }
    }
    out
}

/// Product of two elements of `A ⊗ A ⊗ A` given as flat `d³` vectors.
fn tensor3_mul(sp: &[Vec<(usize, C64)>], d: usize, x: &[C64], y: &[C64]) -> Vec<C64> {
    let xs = nonzero3(x, d);
    let ys = nonzero3(y, d);
    let mut out = vec![ZERO; d * d * d];
    for &(a, b, c, cx) in &xs {
        for &(a2, b2, c2, cy) in &ys {
            let coef = cx * cy;
            for &(p, m1) in &sp[a * d + a2] {
                for &(q, m2) in &sp[b * d + b2] {
                    for &(r, m3) in &sp[c * d + c2] {
                        out[(p * d + q) * d + r] += coef * m1 * m2 * m3;
                    }
                }
            }
        }
    }
    out
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).norm()))
}

/// Axioms of a weak bialgebra: the algebra laws, multiplicativity of `Δ`,
/// both counit identities, both unit identities, coassociativity, the
/// counit law and `Δ(x*) = Δ(x)*`.
pub fn verify_weak_bialgebra(w: &WeakHopfAlgebra) -> BialgebraReport {
    let p = &w.algebra;
    let d = p.dim();
    let sp = sparse_products(p);
    let algebra = p.residuals().max();
    let deltas: Vec<CMat> = (0..d).map(|k| w.coproduct(&p.basis_vector(k))).collect();

    let mut multiplicative: f64 = 0.0;
    for i in 0..d {
        for j in 0..d {
            let prod = p.mul(&p.basis_vector(i), &p.basis_vector(j));
            let lhs = w.coproduct(&prod);
            let rhs = tensor2_mul(&sp, d, &deltas[i], &deltas[j]);
            multiplicative = multiplicative.max(max_abs(&(lhs - rhs)));
        }
    }

    let f = w.counit_form();
    let (mut c1, mut c2): (f64, f64) = (0.0, 0.0);
    for y in 0..d {
        let first = &f * &deltas[y] * &f;
        let second = &f * deltas[y].transpose() * &f;
        for x in 0..d {
            for z in 0..d {
                let lhs: C64 = sp[x * d + y].iter().map(|&(q, m)| m * f[(q, z)]).sum();
                c1 = c1.max((lhs - first[(x, z)]).norm());
                c2 = c2.max((lhs - second[(x, z)]).norm());
            }
        }
    }

    let one = w.delta_one();
    let unit = p.unit();
    let mut d2 = vec![ZERO; d * d * d];
    let mut left = vec![ZERO; d * d * d];
    let mut right = vec![ZERO; d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                let k = (a * d + b) * d + c;
                d2[k] = (0..d).map(|i| one[(i, c)] * w.delta[(a * d + b, i)]).sum();
                left[k] = one[(a, b)] * unit[c];
                right[k] = unit[a] * one[(b, c)];
            }
        }
    }
    let unit_left = max_diff(&d2, &tensor3_mul(&sp, d, &left, &right));
    let unit_right = max_diff(&d2, &tensor3_mul(&sp, d, &right, &left));

    let mut coassociative: f64 = 0.0;
    for k in 0..d {
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    let l: C64 = (0..d).map(|i| deltas[k][(i, c)] * deltas[i][(a, b)]).sum();
                    let r: C64 = (0..d).map(|i| deltas[k][(a, i)] * deltas[i][(b, c)]).sum();
                    coassociative = coassociative.max((l - r).norm());
                }
            }
        }
    }

    let mut counit_law: f64 = 0.0;
    for (k, dk) in deltas.iter().enumerate() {
        let l = dk.transpose() * &w.eps;
        let r = dk * &w.eps;
        let e = p.basis_vector(k);
        counit_law = counit_law.max(max_abs_vec(&(l - &e))).max(max_abs_vec(&(r - &e)));
    }

    let j = p.involution();
    let mut star_preserving: f64 = 0.0;
    for (k, dk) in deltas.iter().enumerate() {
        let lhs = w.coproduct(&p.star(&p.basis_vector(k)));
        let rhs = j * dk.map(|z| z.conj()) * j.transpose();
        star_preserving = star_preserving.max(max_abs(&(lhs - rhs)));
    }

    BialgebraReport {
        algebra,
        multiplicative,
        counit_first: c1,
        counit_second: c2,
        unit_left,
        unit_right,
        coassociative,
        counit_law,
        star_preserving,
    }
}

/// The target and source counital maps as `d × d` matrices:
/// `ε^t(x) = ε(1₁x) 1₂` and `ε^s(x) = 1₁ ε(x1₂)`.
pub fn counital_maps(w: &WeakHopfAlgebra) -> (CMat, CMat) {
    let one = w.delta_one();
    let f = w.counit_form();
    (one.transpose() * &f, &one * f.transpose())
}

fn apply_antipode(w: &WeakHopfAlgebra, x: &CVec) -> CVec {
    &w.antipode * x
}

/// The three antipode identities on every basis element.
pub fn verify_antipode(w: &WeakHopfAlgebra) -> AntipodeReport {
    let p = &w.algebra;
    let d = p.dim();
    let (et, es) = counital_maps(w);
    let s_cols: Vec<CVec> = (0..d).map(|k| apply_antipode(w, &p.basis_vector(k))).collect();
    let (mut target, mut source, mut sandwich): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for k in 0..d {
        let dk = w.coproduct(&p.basis_vector(k));
        let mut lt = CVec::zeros(d);
        let mut ls = CVec::zeros(d);
        let mut sw = CVec::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let c = dk[(i, j)];
                if c == ZERO {
                    continue;
                }
                lt += p.mul(&p.basis_vector(i), &s_cols[j]) * c;
                ls += p.mul(&s_cols[i], &p.basis_vector(j)) * c;
                // (Δ ⊗ id)Δ(e_k) = Σ c Δ(e_i) ⊗ e_j
                let di = w.coproduct(&p.basis_vector(i));
                for a in 0..d {
                    for b in 0..d {
                        let c2 = di[(a, b)];
                        if c2 == ZERO {
                            continue;
                        }
                        let t = p.mul(&p.mul(&s_cols[a], &p.basis_vector(b)), &s_cols[j]);
                        sw += t * (c * c2);
                    }
                }
            }
        }
        target = target.max(max_abs_vec(&(lt - et.column(k))));
        source = source.max(max_abs_vec(&(ls - es.column(k))));
        sandwich = sandwich.max(max_abs_vec(&(sw - &s_cols[k])));
    }
    AntipodeReport { target, source, sandwich }
}

/// `S² = id` and `S(x*) = S(x)*`.
pub fn verify_weak_kac(w: &WeakHopfAlgebra) -> KacReport {
    let d = w.dim();
    let s = &w.antipode;
    let j = w.algebra.involution();
    let involutive = max_abs(&(s * s - CMat::identity(d, d)));
    let star_preserving = max_abs(&(s * j - j * s.map(|z| z.conj())));
    KacReport { involutive, star_preserving }
}

/// Largest deviation from idempotence of the two counital maps.
pub fn counital_idempotence(w: &WeakHopfAlgebra) -> f64 {
    let (et, es) = counital_maps(w);
    max_abs(&(&et * &et - &et)).max(max_abs(&(&es * &es - &es)))
}

/// Fixed points of `ε^t` and of `ε^s` as column bases.
pub fn cartan_subalgebras(w: &WeakHopfAlgebra, tol: f64) -> (CMat, CMat) {
    let d = w.dim();
    let (et, es) = counital_maps(w);
    let id = CMat::identity(d, d);
    let rt = tol.max(1e-10);
    (null_space(&(et - &id), rt), null_space(&(es - &id), rt))
}

/// Max residual of `A_t` and `A_s` failing to be unital *-subalgebras.
pub fn cartan_closure_residual(w: &WeakHopfAlgebra, tol: f64) -> f64 {
    let (at, as_) = cartan_subalgebras(w, tol);
    let p = &w.algebra;
    let unit_out = |b: &CMat| {
        let q = crate::linalg::column_space(b, 1e-10);
        max_abs_vec(&(p.unit() - &q * (q.adjoint() * p.unit())))
    };
    p.subspace_closure_residual(&at)
        .max(p.subspace_closure_residual(&as_))
        .max(unit_out(&at))
        .max(unit_out(&as_))
}

/// `Δ(1) = 1 ⊗ 1`.
pub fn is_hopf(w: &WeakHopfAlgebra, tol: f64) -> bool {
    let u = w.algebra.unit();
    let one = w.delta_one();
    let d = w.dim();
    let expected = CMat::from_fn(d, d, |i, j| u[i] * u[j]);
    max_abs(&(one - expected)) <= tol
}

/// Largest deviation of `ε` from multiplicativity on basis pairs.
pub fn counit_multiplicativity(w: &WeakHopfAlgebra) -> f64 {
    let d = w.dim();
    let f = w.counit_form();
    let mut res: f64 = 0.0;
    for x in 0..d {
        for y in 0..d {
            res = res.max((f[(x, y)] - w.eps[x] * w.eps[y]).norm());
        }
    }
    res
}

/// The dual structure on `A*` in the dual basis.
pub fn dual_wha(w: &WeakHopfAlgebra) -> Result<WeakHopfAlgebra> {
    let p = &w.algebra;
    let d = p.dim();
    let mut structure = vec![ZERO; d * d * d];
    let mut delta = CMat::zeros(d * d, d);
    for i in 0..d {
        for j in 0..d {
            for l in 0..d {
                structure[(i * d + j) * d + l] = w.delta[(i * d + j, l)];
                delta[(i * d + j, l)] = p.constant(i, j, l);
            }
        }
    }
    let involution = (p.involution().map(|z| z.conj()) * &w.antipode).transpose();
    let algebra = StarAlgebraPresentation::new_unchecked(d, structure, w.eps.clone(), involution, None)?;
    let mut out = WeakHopfAlgebra::new(algebra, delta, p.unit().clone(), w.antipode.transpose())?;
    out.status = Certification::Pending;
    Ok(out)
}

/// Max difference of all structure tensors.
pub fn structure_distance(a: &WeakHopfAlgebra, b: &WeakHopfAlgebra) -> f64 {
    if a.dim() != b.dim() {
        return f64::INFINITY;
    }
    let pa = &a.algebra;
    let pb = &b.algebra;
    max_diff(pa.structure(), pb.structure())
        .max(max_abs_vec(&(pa.unit() - pb.unit())))
        .max(max_abs(&(pa.involution() - pb.involution())))
        .max(max_abs(&(&a.delta - &b.delta)))
        .max(max_abs_vec(&(&a.eps - &b.eps)))
        .max(max_abs(&(&a.antipode - &b.antipode)))
}

/// The inclusion `A_t ⊂ A` as an embedding of multi-matrix algebras.
pub fn target_inclusion(w: &WeakHopfAlgebra, seed: u64, tol: f64) -> Result<UnitalEmbedding> {
    let wd = wedderburn(&w.algebra, seed, tol)?;
    let (at, _) = cartan_subalgebras(w, tol);
    let in_mm = &wd.phi_inv * at;
    let sub = Subalgebra::new(&wd.algebra, in_mm)?;
    sub.to_embedding(seed.wrapping_add(1), tol)
}

/// `A_t ⊂ A` is connected.
pub fn is_connected_wha(w: &WeakHopfAlgebra, seed: u64, tol: f64) -> Result<bool> {
    Ok(target_inclusion(w, seed, tol)?.is_connected())
}

/// Both `A` and its dual are connected.
pub fn is_biconnected(w: &WeakHopfAlgebra, seed: u64, tol: f64) -> Result<bool> {
    Ok(is_connected_wha(w, seed, tol)? && is_connected_wha(&dual_wha(w)?, seed, tol)?)
}

/// The relative commutant `A_t′ ∩ A` dimension, for diagnostics.
pub fn target_commutant_dim(w: &WeakHopfAlgebra, seed: u64, tol: f64) -> Result<usize> {
    Ok(relative_commutant(&target_inclusion(w, seed, tol)?, tol).dim())
}

/// A finite groupoid with morphisms `0..n`.
///
/// `compose[g * n + h]` is `g ∘ h` (first `h`, then `g`), defined exactly
/// when `src(g) = tgt(h)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Groupoid {
    objects: usize,
    src: Vec<usize>,
    tgt: Vec<usize>,
    compose: Vec<Option<usize>>,
    inverse: Vec<usize>,
    identities: Vec<usize>,
    name: String,
}

impl Groupoid {
    /// Validates composability, associativity, identities and inverses.
    pub fn new(
        objects: usize,
        src: Vec<usize>,
        tgt: Vec<usize>,
        compose: Vec<Option<usize>>,
        inverse: Vec<usize>,
    ) -> Result<Self> {
        let n = src.len();
        let bad = |m: String| Err(Error::InvalidGroupoid(m));
        if objects == 0 || n == 0 {
            return bad("a groupoid needs objects and morphisms".into());
        }
        if tgt.len() != n || inverse.len() != n || compose.len() != n * n {
            return bad("src, tgt, inverse and compose have inconsistent lengths".into());
        }
        if src.iter().chain(&tgt).any(|&o| o >= objects) {
            return bad("a morphism refers to an unknown object".into());
        }
        for g in 0..n {
            for h in 0..n {
                let c = compose[g * n + h];
                match (src[g] == tgt[h], c) {
                    (true, None) => return bad(format!("{g}∘{h} is composable but undefined")),
                    (false, Some(_)) => return bad(format!("{g}∘{h} is defined but not composable")),
                    (true, Some(k)) if k >= n || src[k] != src[h] || tgt[k] != tgt[g] => {
                        return bad(format!("{g}∘{h} = {k} has the wrong endpoints"))
                    }
                    _ => {}
                }
            }
        }
        for f in 0..n {
            for g in 0..n {
                for h in 0..n {
                    if let (Some(gh), Some(fg)) = (compose[g * n + h], compose[f * n + g]) {
                        if compose[f * n + gh] != compose[fg * n + h] {
                            return bad(format!("composition is not associative at ({f}, {g}, {h})"));
                        }
                    }
                }
            }
        }
        let mut identities = Vec::with_capacity(objects);
        for o in 0..objects {
            let id = (0..n).find(|&e| {
                src[e] == o
                    && tgt[e] == o
                    && (0..n).all(|g| {
                        (tgt[g] != o || compose[e * n + g] == Some(g)) && (src[g] != o || compose[g * n + e] == Some(g))
                    })
            });
            match id {
                Some(e) => identities.push(e),
                None => return bad(format!("object {o} has no identity")),
            }
        }
        for g in 0..n {
            let inv = inverse[g];
            if inv >= n
                || compose[g * n + inv] != Some(identities[tgt[g]])
                || compose[inv * n + g] != Some(identities[src[g]])
            {
                return bad(format!("inverse of {g} is wrong"));
            }
        }
        Ok(Self { objects, src, tgt, compose, inverse, identities, name: "groupoid".into() })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn morphisms(&self) -> usize {
        self.src.len()
    }

    pub fn src(&self, g: usize) -> usize {
        self.src[g]
    }

    pub fn tgt(&self, g: usize) -> usize {
        self.tgt[g]
    }

    pub fn compose(&self, g: usize, h: usize) -> Option<usize> {
        self.compose[g * self.morphisms() + h]
    }

    pub fn inverse(&self, g: usize) -> usize {
        self.inverse[g]
    }

    pub fn identities(&self) -> &[usize] {
        &self.identities
    }

    pub fn is_group(&self) -> bool {
        self.objects == 1
    }

    /// A group from its multiplication table; element 0 must be the identity.
    pub fn group(table: &[Vec<usize>]) -> Result<Self> {
        let n = table.len();
        let compose = (0..n * n).map(|k| Some(table[k / n][k % n])).collect();
        let inverse = (0..n)
            .map(|g| (0..n).find(|&h| table[g][h] == 0).unwrap_or(0))
            .collect();
        Self::new(1, vec![0; n], vec![0; n], compose, inverse)
    }

    pub fn cyclic(n: usize) -> Self {
        let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::group(&table).expect("cyclic group").with_name(format!("Z/{n}"))
    }

    pub fn klein_four() -> Self {
        let table: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        Self::group(&table).expect("Klein group").with_name("Z/2xZ/2")
    }

    /// `S₃` as permutations of three points.
    pub fn symmetric3() -> Self {
        let perms: [[usize; 3]; 6] = [[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let idx = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let table: Vec<Vec<usize>> = perms
            .iter()
            .map(|a| perms.iter().map(|b| idx([a[b[0]], a[b[1]], a[b[2]]])).collect())
            .collect();
        Self::group(&table).expect("S3").with_name("S3")
    }

    /// `n` objects, identities only.
    pub fn discrete(n: usize) -> Self {
        let compose = (0..n * n).map(|k| (k / n == k % n).then_some(k / n)).collect();
        Self::new(n, (0..n).collect(), (0..n).collect(), compose, (0..n).collect())
            .expect("discrete groupoid")
            .with_name(format!("discrete({n})"))
    }

    /// One morphism between every ordered pair of `n` objects; morphism
    /// `x * n + y` goes from `y` to `x`.
    pub fn pair(n: usize) -> Self {
        let m = n * n;
        let src: Vec<usize> = (0..m).map(|g| g % n).collect();
        let tgt: Vec<usize> = (0..m).map(|g| g / n).collect();
        let compose = (0..m * m)
            .map(|k| {
                let (g, h) = (k / m, k % m);
                (src[g] == tgt[h]).then_some(tgt[g] * n + src[h])
            })
            .collect();
        let inverse = (0..m).map(|g| src[g] * n + tgt[g]).collect();
        Self::new(n, src, tgt, compose, inverse).expect("pair groupoid").with_name(format!("pair({n})"))
    }

    pub fn disjoint_union(&self, other: &Groupoid) -> Self {
        let (n1, n2) = (self.morphisms(), other.morphisms());
        let n = n1 + n2;
        let src = self.src.iter().copied().chain(other.src.iter().map(|o| o + self.objects)).collect();
        let tgt = self.tgt.iter().copied().chain(other.tgt.iter().map(|o| o + self.objects)).collect();
        let compose = (0..n * n)
            .map(|k| {
                let (g, h) = (k / n, k % n);
                match (g < n1, h < n1) {
                    (true, true) => self.compose(g, h),
                    (false, false) => other.compose(g - n1, h - n1).map(|c| c + n1),
                    _ => None,
                }
            })
            .collect();
        let inverse =
            self.inverse.iter().copied().chain(other.inverse.iter().map(|g| g + n1)).collect();
        Self::new(self.objects + other.objects, src, tgt, compose, inverse)
            .expect("disjoint union of groupoids")
            .with_name(format!("{}+{}", self.name, other.name))
    }

    /// Direct product: objects and morphisms are pairs.
    pub fn product(&self, other: &Groupoid) -> Self {
        let (n1, n2) = (self.morphisms(), other.morphisms());
        let n = n1 * n2;
        let o2 = other.objects;
        let src = (0..n).map(|g| self.src[g / n2] * o2 + other.src[g % n2]).collect();
        let tgt = (0..n).map(|g| self.tgt[g / n2] * o2 + other.tgt[g % n2]).collect();
        let compose = (0..n * n)
            .map(|k| {
                let (g, h) = (k / n, k % n);
                let a = self.compose(g / n2, h / n2)?;
                let b = other.compose(g % n2, h % n2)?;
                Some(a * n2 + b)
            })
            .collect();
        let inverse = (0..n).map(|g| self.inverse[g / n2] * n2 + other.inverse[g % n2]).collect();
        Self::new(self.objects * o2, src, tgt, compose, inverse)
            .expect("product of groupoids")
            .with_name(format!("{}x{}", self.name, other.name))
    }

    /// The group generated by permutations, closed under composition.
    fn permutation_group(gens: &[Vec<usize>], name: &str) -> Self {
        let m = gens[0].len();
        let mut elems: Vec<Vec<usize>> = vec![(0..m).collect()];
        let mut i = 0;
        while i < elems.len() {
            for g in gens {
                let p: Vec<usize> = (0..m).map(|x| elems[i][g[x]]).collect();
                if !elems.contains(&p) {
                    elems.push(p);
                }
            }
            i += 1;
        }
        let idx = |p: &Vec<usize>| elems.iter().position(|q| q == p).unwrap();
        let table: Vec<Vec<usize>> = elems
            .iter()
            .map(|a| elems.iter().map(|b| idx(&(0..m).map(|x| a[b[x]]).collect())).collect())
            .collect();
        Self::group(&table).expect("permutation group").with_name(name)
    }

    /// Dihedral group of order 8.
    pub fn dihedral4() -> Self {
        Self::permutation_group(&[vec![1, 2, 3, 0], vec![0, 3, 2, 1]], "D4")
    }

    /// Quaternion group; element `2u + s` is `(-1)^s` times unit `u ∈ {1, i, j, k}`.
    pub fn quaternion() -> Self {
        // unit products: (target unit, sign flip)
        const T: [[(usize, usize); 4]; 4] = [
            [(0, 0), (1, 0), (2, 0), (3, 0)],
            [(1, 0), (0, 1), (3, 0), (2, 1)],
            [(2, 0), (3, 1), (0, 1), (1, 0)],
            [(3, 0), (2, 0), (1, 1), (0, 1)],
        ];
        let table: Vec<Vec<usize>> = (0..8)
            .map(|a| {
                (0..8)
                    .map(|b| {
                        let (u, f) = T[a / 2][b / 2];
                        2 * u + ((a % 2 + b % 2 + f) % 2)
                    })
                    .collect()
            })
            .collect();
        Self::group(&table).expect("Q8").with_name("Q8")
    }

    /// Every group of order at most `max`, up to isomorphism (`max ≤ 8`).
    fn small_groups(max: usize) -> Vec<Groupoid> {
        let mut gs: Vec<Groupoid> = (1..=max.min(8)).map(Groupoid::cyclic).collect();
        if max >= 4 {
            gs.push(Groupoid::klein_four());
        }
        if max >= 6 {
            gs.push(Groupoid::symmetric3());
        }
        if max >= 8 {
            gs.push(Groupoid::cyclic(4).product(&Groupoid::cyclic(2)).with_name("Z/4xZ/2"));
            gs.push(Groupoid::klein_four().product(&Groupoid::cyclic(2)).with_name("(Z/2)^3"));
            gs.push(Groupoid::dihedral4());
            gs.push(Groupoid::quaternion());
        }
        gs
    }

    /// Connected groupoids with at most `max` morphisms: `pair(n) × G`.
    fn connected(max: usize) -> Vec<Groupoid> {
        let mut out = Vec::new();
        for n in 1.. {
            if n * n > max {
                break;
            }
            for g in Self::small_groups(max / (n * n)) {
                out.push(if n == 1 { g } else { Groupoid::pair(n).product(&g).with_name(format!("pair({n})x{}", g.name)) });
            }
        }
        out
    }

    /// Every groupoid with at most `max` morphisms up to isomorphism, as
    /// disjoint unions of connected ones (`max ≤ 8`).
    pub fn enumerate(max: usize) -> Vec<Groupoid> {
        let comps = Self::connected(max);
        let mut out = Vec::new();
        fn rec(comps: &[Groupoid], start: usize, left: usize, acc: Option<Groupoid>, out: &mut Vec<Groupoid>) {
            if let Some(g) = &acc {
                out.push(g.clone());
            }
            for i in start..comps.len() {
                let c = &comps[i];
                if c.morphisms() <= left {
                    let next = match &acc {
                        None => c.clone(),
                        Some(g) => g.disjoint_union(c),
                    };
                    rec(comps, i, left - c.morphisms(), Some(next), out);
                }
            }
        }
        rec(&comps, 0, max, None, &mut out);
        out
    }
}

/// `ℂG` with `gh = g∘h` (zero when not composable), `g* = g⁻¹`,
/// `Δ(g) = g ⊗ g`, `ε(g) = 1`, `S(g) = g⁻¹`.
pub fn groupoid_algebra(g: &Groupoid) -> Result<WeakHopfAlgebra> {
    let d = g.morphisms();
    let mut structure = vec![ZERO; d * d * d];
    for a in 0..d {
        for b in 0..d {
            if let Some(c) = g.compose(a, b) {
                structure[(a * d + b) * d + c] = real(1.0);
            }
        }
    }
    let mut unit = CVec::zeros(d);
    for &e in g.identities() {
        unit[e] = real(1.0);
    }
    let mut involution = CMat::zeros(d, d);
    let mut antipode = CMat::zeros(d, d);
    let mut delta = CMat::zeros(d * d, d);
    for a in 0..d {
        involution[(g.inverse(a), a)] = real(1.0);
        antipode[(g.inverse(a), a)] = real(1.0);
        delta[(a * d + a, a)] = real(1.0);
    }
    let eps = CVec::from_element(d, real(1.0));
    let algebra = StarAlgebraPresentation::new_unchecked(d, structure, unit, involution, None)?;
    WeakHopfAlgebra::new(algebra, delta, eps, antipode)
}

impl WeakHopfAlgebra {
    /// Multi-matrix shape of the underlying algebra.
    pub fn shape(&self, seed: u64, tol: f64) -> Result<MultiMatrix> {
        Ok(wedderburn(&self.algebra, seed, tol)?.algebra)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_group_algebra_is_kac() {
        let w = groupoid_algebra(&Groupoid::cyclic(3)).unwrap().certify(0.0);
        assert_eq!(w.status(), Certification::WeakKac);
        assert!(is_hopf(&w, 0.0));
    }

    #[test]
    fn zero_coproduct_fails_counit_law() {
        let w = groupoid_algebra(&Groupoid::cyclic(3)).unwrap();
        let bad = WeakHopfAlgebra::new(w.algebra().clone(), CMat::zeros(9, 3), w.eps().clone(), w.antipode().clone())
            .unwrap();
        assert!(verify_weak_bialgebra(&bad).counit_law > 0.5);
    }

    #[test]
    fn identity_antipode_fails() {
        let w = groupoid_algebra(&Groupoid::cyclic(3)).unwrap();
        let bad = WeakHopfAlgebra::new(w.algebra().clone(), w.delta().clone(), w.eps().clone(), CMat::identity(3, 3))
            .unwrap();
        assert!(verify_antipode(&bad).target > 0.5);
    }

    #[test]
    fn pair_groupoid() {
        let w = groupoid_algebra(&Groupoid::pair(2)).unwrap().certify(0.0);
        assert_eq!(w.status(), Certification::WeakKac);
        assert!(!is_hopf(&w, 1e-12));
        assert_eq!(w.shape(0, 1e-9).unwrap().block_dims(), &[2]);
        let (at, _) = cartan_subalgebras(&w, 1e-10);
        assert_eq!(at.ncols(), 2);
        assert!(is_connected_wha(&w, 0, 1e-9).unwrap());
    }

    #[test]
    fn target_map_on_groupoid() {
        let g = Groupoid::pair(2);
        let w = groupoid_algebra(&g).unwrap();
        let (et, _) = counital_maps(&w);
        for m in 0..g.morphisms() {
            let mut expected = CVec::zeros(4);
            expected[g.identities()[g.tgt(m)]] = real(1.0);
            assert!(max_abs_vec(&(et.column(m) - expected)) == 0.0);
        }
        assert!(counital_idempotence(&w) < 1e-12);
        assert!(cartan_closure_residual(&w, 1e-10) < 1e-12);
    }

    #[test]
    fn discrete_is_not_connected() {
        let w = groupoid_algebra(&Groupoid::discrete(2)).unwrap().certify(0.0);
        assert_eq!(w.status(), Certification::WeakKac);
        assert!(!is_connected_wha(&w, 0, 1e-9).unwrap());
        assert!(!is_biconnected(&w, 0, 1e-9).unwrap());
    }

    #[test]
    fn dual_of_z2_is_commutative_and_double_dual_returns() {
        let w = groupoid_algebra(&Groupoid::cyclic(2)).unwrap();
        let dual = dual_wha(&w).unwrap().certify(1e-12);
        assert_eq!(dual.status(), Certification::WeakKac);
        assert!(dual.algebra().is_commutative(1e-12));
        assert_eq!(dual.shape(0, 1e-9).unwrap().block_dims(), &[1, 1]);
        let back = dual_wha(&dual).unwrap();
        assert!(structure_distance(&w, &back) < 1e-12);
    }

    #[test]
    fn s3_center_has_three_classes() {
        let w = groupoid_algebra(&Groupoid::symmetric3()).unwrap();
        assert_eq!(w.algebra().center(1e-10).ncols(), 3);
        assert_eq!(w.shape(1, 1e-9).unwrap().block_dims(), &[1, 1, 2]);
    }

    #[test]
    fn enumeration_counts() {
        let all = Groupoid::enumerate(6);
        assert!(all.iter().all(|g| g.morphisms() <= 6));
        assert_eq!(all.iter().filter(|g| g.morphisms() == 2).count(), 2);
        assert_eq!(all.iter().filter(|g| g.morphisms() == 4).count(), 7);
        assert_eq!(Groupoid::quaternion().morphisms(), 8);
        assert_eq!(Groupoid::dihedral4().morphisms(), 8);
    }

    #[test]
    fn invalid_groupoid_is_rejected() {
        let r = Groupoid::new(1, vec![0, 0], vec![0, 0], vec![Some(0), Some(1), Some(1), Some(1)], vec![0, 1]);
        assert!(r.is_err());
    }
}
