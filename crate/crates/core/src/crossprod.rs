//! Actions of weak Kac algebras on finite-dimensional *-algebras and the
//! crossed product `M ⋊ A = M ⊗_{A_t} A`.

use crate::error::{Error, Result};
use crate::fdca::StarAlgebraPresentation;
use crate::linalg::{column_space, max_abs, max_abs_vec, null_space, real, same_span, singular_values, CMat, CVec, C64};
use crate::wha::{cartan_subalgebras, counital_maps, Certification, WeakHopfAlgebra};

const ZERO: C64 = C64::new(0.0, 0.0);

/// `a ▷ x = ops[a] · x` for basis elements `a` of the acting algebra.
#[derive(Debug, Clone)]
pub struct ActionData {
    acting: WeakHopfAlgebra,
    target: StarAlgebraPresentation,
    ops: Vec<CMat>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActionReport {
    pub acting_certified: bool,
    pub unit_law: f64,
    pub module_law: f64,
    pub multiplicative: f64,
    pub star_compatible: f64,
    pub unit_literal: f64,
    /// The kernels of `a ↦ a▷1` and `ε^t` agree.
    pub unit_kernels_agree: bool,
}

impl ActionReport {
    pub fn max(&self) -> f64 {
        [self.unit_law, self.module_law, self.multiplicative, self.star_compatible, self.unit_literal]
            .into_iter()
            .fold(0.0, f64::max)
    }

    pub fn ok(&self, tol: f64) -> bool {
        self.acting_certified && self.unit_kernels_agree && self.max() <= tol
    }

    /// The literal reading of the unit axiom and the kernel reading disagree.
    pub fn unit_readings_differ(&self, tol: f64) -> bool {
        (self.unit_literal <= tol) != self.unit_kernels_agree
    }

    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("1>x = x", self.unit_law),
            ("a>(b>x) = (ab)>x", self.module_law),
            ("a>xy = (a1>x)(a2>y)", self.multiplicative),
            ("(a>x)* = S(a)*>x*", self.star_compatible),
            ("a>1 = eps_t(a)>1", self.unit_literal),
        ]
    }
}

impl ActionData {
    pub fn new(acting: WeakHopfAlgebra, target: StarAlgebraPresentation, ops: Vec<CMat>) -> Result<Self> {
        let (da, dm) = (acting.dim(), target.dim());
        if ops.len() != da || ops.iter().any(|m| m.nrows() != dm || m.ncols() != dm) {
            return Err(Error::ShapeMismatch(format!("action needs {da} operators of size {dm}x{dm}")));
        }
        Ok(Self { acting, target, ops })
    }

    /// From a flat tensor with `a ▷ e_x = Σ_y t[(a·m + x)·m + y] e_y`.
    pub fn from_tensor(acting: WeakHopfAlgebra, target: StarAlgebraPresentation, tensor: &[C64]) -> Result<Self> {
        let (da, dm) = (acting.dim(), target.dim());
        if tensor.len() != da * dm * dm {
            return Err(Error::ShapeMismatch(format!("action tensor needs {} entries", da * dm * dm)));
        }
        let ops = (0..da)
            .map(|a| CMat::from_fn(dm, dm, |y, x| tensor[(a * dm + x) * dm + y]))
            .collect();
        Self::new(acting, target, ops)
    }

    pub fn to_tensor(&self) -> Vec<C64> {
        let (da, dm) = (self.acting.dim(), self.target.dim());
        let mut t = vec![ZERO; da * dm * dm];
        for a in 0..da {
            for x in 0..dm {
                for y in 0..dm {
                    t[(a * dm + x) * dm + y] = self.ops[a][(y, x)];
                }
            }
        }
        t
    }

    /// `a ▷ x = ε(a) x`.
    pub fn trivial(acting: WeakHopfAlgebra, target: StarAlgebraPresentation) -> Self {
        let dm = target.dim();
        let ops = acting.eps().iter().map(|&e| CMat::identity(dm, dm) * e).collect();
        Self { acting, target, ops }
    }

    /// `a ▷ z = ε^t(az)` on the target Cartan subalgebra `A_t`.
    pub fn counital(acting: WeakHopfAlgebra, tol: f64) -> Result<Self> {
        let (at, _) = cartan_subalgebras(&acting, tol);
        let p = acting.algebra();
        let target = p.subalgebra(&at, tol)?;
        let pinv = crate::linalg::left_inverse(&at)?;
        let (et, _) = counital_maps(&acting);
        let ops = (0..acting.dim())
            .map(|a| &pinv * &et * p.left_mul_matrix(&p.basis_vector(a)) * &at)
            .collect();
        Ok(Self { acting, target, ops })
    }

    pub fn acting(&self) -> &WeakHopfAlgebra {
        &self.acting
    }

    pub fn target(&self) -> &StarAlgebraPresentation {
        &self.target
    }

    pub fn ops(&self) -> &[CMat] {
        &self.ops
    }

    /// The operator of a general element `a`.
    pub fn operator(&self, a: &CVec) -> CMat {
        let dm = self.target.dim();
        a.iter().zip(&self.ops).fold(CMat::zeros(dm, dm), |acc, (&c, op)| acc + op * c)
    }

    pub fn act(&self, a: &CVec, x: &CVec) -> CVec {
        self.operator(a) * x
    }
}

/// Module laws and the three action axioms on basis tuples.
pub fn verify_action(act: &ActionData, tol: f64) -> ActionReport {
    let w = &act.acting;
    let p = w.algebra();
    let m = &act.target;
    let (da, dm) = (w.dim(), m.dim());

    let unit_op = act.operator(p.unit());
    let unit_law = max_abs(&(unit_op - CMat::identity(dm, dm)));

    let mut module_law: f64 = 0.0;
    for a in 0..da {
        for b in 0..da {
            let ab = p.mul(&p.basis_vector(a), &p.basis_vector(b));
            module_law = module_law.max(max_abs(&(&act.ops[a] * &act.ops[b] - act.operator(&ab))));
        }
    }

    let mut multiplicative: f64 = 0.0;
    for a in 0..da {
        let d = w.coproduct(&p.basis_vector(a));
        for x in 0..dm {
            for y in 0..dm {
                let lhs = &act.ops[a] * m.mul(&m.basis_vector(x), &m.basis_vector(y));
                let mut rhs = CVec::zeros(dm);
                for k in 0..da {
                    for l in 0..da {
                        if d[(k, l)] != ZERO {
                            rhs += m.mul(&act.ops[k].column(x).into_owned(), &act.ops[l].column(y).into_owned()) * d[(k, l)];
                        }
                    }
                }
                multiplicative = multiplicative.max(max_abs_vec(&(lhs - rhs)));
            }
        }
    }

    let mut star_compatible: f64 = 0.0;
    for a in 0..da {
        let sa = p.star(&(w.antipode() * p.basis_vector(a)));
        let op = act.operator(&sa);
        for x in 0..dm {
            let lhs = m.star(&act.ops[a].column(x).into_owned());
            let rhs = &op * m.star(&m.basis_vector(x));
            star_compatible = star_compatible.max(max_abs_vec(&(lhs - rhs)));
        }
    }

    let (et, _) = counital_maps(w);
    let one = m.unit();
    let mut unit_literal: f64 = 0.0;
    let mut on_one = CMat::zeros(dm, da);
    for a in 0..da {
        let lhs = &act.ops[a] * one;
        let rhs = act.operator(&et.column(a).into_owned()) * one;
        unit_literal = unit_literal.max(max_abs_vec(&(&lhs - rhs)));
        on_one.set_column(a, &lhs);
    }
    let k1 = null_space(&on_one, tol.max(1e-10));
    let k2 = null_space(&et, tol.max(1e-10));
    let unit_kernels_agree = same_span(&k1, &k2, tol.max(1e-8));

    ActionReport {
        acting_certified: w.status() == Certification::WeakKac,
        unit_law,
        module_law,
        multiplicative,
        star_compatible,
        unit_literal,
        unit_kernels_agree,
    }
}

/// `M ⋊ A` with the quotient `M ⊗ A → M ⋊ A` given by `quotient_basis`ᴴ.
#[derive(Debug, Clone)]
pub struct CrossedProductData {
    pub result: StarAlgebraPresentation,
    /// Orthonormal columns spanning the complement of the relation span in
    /// `M ⊗ A`, coordinates `x·dim A + a`.
    pub quotient_basis: CMat,
    /// `x ↦ [x ⊗ 1]`.
    pub embed_m: CMat,
    /// `a ↦ [1 ⊗ a]`.
    pub embed_a: CMat,
    pub relation_rank: usize,
    /// Largest component of a product or adjoint of a relation outside the
    /// relation span.
    pub well_defined_residual: f64,
    acting: WeakHopfAlgebra,
    full: Vec<CMat>,
    full_star: CMat,
    dims: (usize, usize),
}

impl CrossedProductData {
    pub fn acting(&self) -> &WeakHopfAlgebra {
        &self.acting
    }

    pub fn dim(&self) -> usize {
        self.result.dim()
    }

    /// `[x ⊗ a]`.
    pub fn class_of(&self, x: &CVec, a: &CVec) -> CVec {
        let v = CVec::from_fn(self.dims.0 * self.dims.1, |k, _| x[k / self.dims.1] * a[k % self.dims.1]);
        self.quotient_basis.adjoint() * v
    }

    /// Product on representatives in `M ⊗ A` before passing to the quotient.
    pub fn raw_product(&self, v: &CVec, w: &CVec) -> CVec {
        let n = v.len();
        CVec::from_fn(n, |k, _| (v.transpose() * &self.full[k] * w)[(0, 0)])
    }

    /// Max residual of `[1⊗a][x⊗1] = [(a₁▷x) ⊗ a₂]` over basis elements.
    pub fn covariance_residual(&self, act: &ActionData) -> f64 {
        let p = self.acting.algebra();
        let (dm, da) = self.dims;
        let mut res: f64 = 0.0;
        for a in 0..da {
            let d = self.acting.coproduct(&p.basis_vector(a));
            for x in 0..dm {
                let lhs = self.result.mul(&self.embed_a.column(a).into_owned(), &self.embed_m.column(x).into_owned());
                let mut rhs = CVec::zeros(self.dim());
                for k in 0..da {
                    for l in 0..da {
                        if d[(k, l)] != ZERO {
                            rhs += self.class_of(&act.ops[k].column(x).into_owned(), &p.basis_vector(l)) * d[(k, l)];
                        }
                    }
                }
                res = res.max(max_abs_vec(&(lhs - rhs)));
            }
        }
        res
    }

    /// Max residual of `x ↦ [x ⊗ 1]` failing to be a unital *-homomorphism.
    pub fn embed_m_residual(&self, m: &StarAlgebraPresentation) -> f64 {
        let dm = m.dim();
        let e = &self.embed_m;
        let mut res = max_abs_vec(&(e * m.unit() - self.result.unit()));
        for x in 0..dm {
            let ex = e.column(x).into_owned();
            res = res.max(max_abs_vec(&(self.result.star(&ex) - e * m.star(&m.basis_vector(x)))));
            for y in 0..dm {
                let lhs = self.result.mul(&ex, &e.column(y).into_owned());
                let rhs = e * m.mul(&m.basis_vector(x), &m.basis_vector(y));
                res = res.max(max_abs_vec(&(lhs - rhs)));
            }
        }
        res
    }

    /// The adjoint in `M ⊗ A` before passing to the quotient.
    pub fn raw_star(&self, v: &CVec) -> CVec {
        &self.full_star * v.map(|z| z.conj())
    }
}

/// Builds `M ⊗ A`, divides by `span{x(z▷1) ⊗ a − x ⊗ za : z ∈ A_t}` and
/// installs product and involution on the quotient.
pub fn crossed_product(act: &ActionData, tol: f64) -> Result<CrossedProductData> {
    let report = verify_action(act, tol);
    if !report.ok(tol.max(1e-9)) {
        let why = if !report.acting_certified {
            "acting algebra is not a certified weak Kac algebra".to_string()
        } else {
            format!("max residual {:.3e}, unit kernels agree: {}", report.max(), report.unit_kernels_agree)
        };
        return Err(Error::ActionNotVerified(why));
    }
    let w = &act.acting;
    let p = w.algebra();
    let m = &act.target;
    let (da, dm) = (w.dim(), m.dim());
    let n = dm * da;
    let idx = |x: usize, a: usize| x * da + a;

    let (at, _) = cartan_subalgebras(w, tol);
    let mut rel_cols = Vec::new();
    for zi in 0..at.ncols() {
        let z = at.column(zi).into_owned();
        let z_on_one = act.act(&z, m.unit());
        for x in 0..dm {
            let xz = m.mul(&m.basis_vector(x), &z_on_one);
            for a in 0..da {
                let za = p.mul(&z, &p.basis_vector(a));
                let mut v = CVec::zeros(n);
                for y in 0..dm {
                    v[idx(y, a)] += xz[y];
                }
                for b in 0..da {
                    v[idx(x, b)] -= za[b];
                }
                rel_cols.push(v);
            }
        }
    }
    let rel = if rel_cols.is_empty() { CMat::zeros(n, 0) } else { CMat::from_columns(&rel_cols) };

    let sv = singular_values(&rel);
    let top = sv.first().copied().unwrap_or(0.0).max(1.0);
    let low = tol.max(1e-12) * top;
    let high = tol.max(1e-12).sqrt() * top;
    if let Some(&bad) = sv.iter().find(|&&s| s > low && s < high) {
        return Err(Error::QuotientRankInstability { value: bad });
    }
    let relation_rank = sv.iter().filter(|&&s| s >= high).count();
    let q_rel = if relation_rank == 0 { CMat::zeros(n, 0) } else { column_space(&rel, tol.max(1e-12)) };
    let u = if relation_rank == 0 { CMat::identity(n, n) } else { null_space(&q_rel.adjoint(), tol.max(1e-12)) };
    let q = u.ncols();
    if q + relation_rank != n {
        return Err(Error::QuotientRankInstability { value: high });
    }

    // full[k][(I, J)] = coefficient of basis k in e_I · e_J
    let mut full = vec![CMat::zeros(n, n); n];
    let deltas: Vec<CMat> = (0..da).map(|a| w.coproduct(&p.basis_vector(a))).collect();
    for x in 0..dm {
        for a in 0..da {
            for y in 0..dm {
                for b in 0..da {
                    for k in 0..da {
                        for l in 0..da {
                            let c = deltas[a][(k, l)];
                            if c == ZERO {
                                continue;
                            }
                            let my = m.mul(&m.basis_vector(x), &act.ops[k].column(y).into_owned());
                            let ab = p.mul(&p.basis_vector(l), &p.basis_vector(b));
                            for (y2, &cm) in my.iter().enumerate() {
                                if cm == ZERO {
                                    continue;
                                }
                                for (b2, &ca) in ab.iter().enumerate() {
                                    if ca != ZERO {
                                        full[idx(y2, b2)][(idx(x, a), idx(y, b))] += c * cm * ca;
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    // [x ⊗ a]* = Σ conj(Δ_a[k,l]) (e_k* ▷ x*) ⊗ e_l*
    let mut full_star = CMat::zeros(n, n);
    let stars_a: Vec<CVec> = (0..da).map(|k| p.star(&p.basis_vector(k))).collect();
    for x in 0..dm {
        let xs = m.star(&m.basis_vector(x));
        for a in 0..da {
            let mut col = CVec::zeros(n);
            for k in 0..da {
                for l in 0..da {
                    let c = deltas[a][(k, l)].conj();
                    if c == ZERO {
                        continue;
                    }
                    let left = act.act(&stars_a[k], &xs);
                    for y in 0..dm {
                        for b in 0..da {
                            col[idx(y, b)] += c * left[y] * stars_a[l][b];
                        }
                    }
                }
            }
            full_star.set_column(idx(x, a), &col);
        }
    }

    let uh = u.adjoint();
    let ut = u.transpose();
    let reduced: Vec<CMat> = full.iter().map(|t| &ut * t * &u).collect();
    let mut structure = vec![ZERO; q * q * q];
    for i in 0..q {
        for j in 0..q {
            let v = CVec::from_fn(n, |k, _| reduced[k][(i, j)]);
            let c = &uh * v;
            for l in 0..q {
                structure[(i * q + j) * q + l] = c[l];
            }
        }
    }
    let mut unit_full = CVec::zeros(n);
    for x in 0..dm {
        for a in 0..da {
            unit_full[idx(x, a)] = m.unit()[x] * p.unit()[a];
        }
    }
    let unit = &uh * &unit_full;
    let involution = &uh * &full_star * u.map(|z| z.conj());

    let mut well: f64 = 0.0;
    if relation_rank > 0 {
        for r in 0..relation_rank {
            let rv = q_rel.column(r).into_owned();
            for j in 0..n {
                let lhs = CVec::from_fn(n, |k, _| {
                    (0..n).map(|i| rv[i] * full[k][(i, j)]).sum::<C64>()
                });
                let rhs = CVec::from_fn(n, |k, _| {
                    (0..n).map(|i| full[k][(j, i)] * rv[i]).sum::<C64>()
                });
                well = well.max(max_abs_vec(&(&uh * lhs))).max(max_abs_vec(&(&uh * rhs)));
            }
            well = well.max(max_abs_vec(&(&uh * (&full_star * rv.map(|z| z.conj())))));
        }
    }

    let result = StarAlgebraPresentation::new_unchecked(q, structure, unit, involution, None)?;
    let mut embed_m = CMat::zeros(q, dm);
    for x in 0..dm {
        let v = CVec::from_fn(n, |k, _| if k / da == x { p.unit()[k % da] } else { ZERO });
        embed_m.set_column(x, &(&uh * v));
    }
    let mut embed_a = CMat::zeros(q, da);
    for a in 0..da {
        let v = CVec::from_fn(n, |k, _| if k % da == a { m.unit()[k / da] } else { ZERO });
        embed_a.set_column(a, &(&uh * v));
    }
    Ok(CrossedProductData {
        result,
        quotient_basis: u,
        embed_m,
        embed_a,
        relation_rank,
        well_defined_residual: well,
        acting: w.clone(),
        full,
        full_star,
        dims: (dm, da),
    })
}

#[derive(Debug, Clone)]
pub struct MinimalityReport {
    pub minimal: bool,
    /// Basis of `A′ ∩ (M ⋊ A)`.
    pub relative_commutant: CMat,
    /// Basis of the image of `A_s`.
    pub source_image: CMat,
}

/// Compares `A′ ∩ (M ⋊ A)` with the image of `A_s`.
pub fn minimality_check(cp: &CrossedProductData, tol: f64) -> MinimalityReport {
    minimality_from_parts(&cp.result, &cp.embed_a, &cp.acting, tol)
}

/// [`minimality_check`] from the result algebra, the embedding of `A` and
/// the acting algebra.
pub fn minimality_from_parts(
    result: &StarAlgebraPresentation,
    embed_a: &CMat,
    acting: &WeakHopfAlgebra,
    tol: f64,
) -> MinimalityReport {
    let q = result.dim();
    let da = embed_a.ncols();
    let mut stacked = CMat::zeros(q * da, q);
    for a in 0..da {
        let y = embed_a.column(a).into_owned();
        let diff = result.right_mul_matrix(&y) - result.left_mul_matrix(&y);
        stacked.view_mut((a * q, 0), (q, q)).copy_from(&diff);
    }
    let relative_commutant = null_space(&stacked, tol.max(1e-10));
    let (_, as_) = cartan_subalgebras(acting, tol);
    let source_image = column_space(&(embed_a * as_), tol.max(1e-10));
    let minimal = same_span(&relative_commutant, &source_image, tol.max(1e-8));
    MinimalityReport { minimal, relative_commutant, source_image }
}

/// `{x ∈ M : a▷x = ε^t(a)▷x}` and its closure residual as a unital *-subalgebra.
pub fn fixed_points(act: &ActionData, tol: f64) -> (CMat, f64) {
    let w = &act.acting;
    let m = &act.target;
    let (da, dm) = (w.dim(), m.dim());
    let (et, _) = counital_maps(w);
    let mut stacked = CMat::zeros(da * dm, dm);
    for a in 0..da {
        let diff = &act.ops[a] - act.operator(&et.column(a).into_owned());
        stacked.view_mut((a * dm, 0), (dm, dm)).copy_from(&diff);
    }
    let basis = null_space(&stacked, tol.max(1e-10));
    let mut res = m.subspace_closure_residual(&basis);
    if basis.ncols() > 0 {
        let unit = m.unit();
        res = res.max(max_abs_vec(&(unit - &basis * (basis.adjoint() * unit))));
    } else {
        res = res.max(max_abs_vec(m.unit()));
    }
    (basis, res)
}

/// `g ▷ (x, y) = (y, x)` for `ℂ[ℤ/2]` acting on `ℂ²`.
pub fn swap_action() -> Result<ActionData> {
    let w = crate::wha::groupoid_algebra(&crate::wha::Groupoid::cyclic(2))?.certify(0.0);
    let m = StarAlgebraPresentation::from_multi_matrix(&crate::fdca::MultiMatrix::commutative(2)?, None);
    let swap = CMat::from_row_slice(2, 2, &[ZERO, real(1.0), real(1.0), ZERO]);
    ActionData::new(w, m, vec![CMat::identity(2, 2), swap])
}

/// `g^a ▷ h^b = ω^{ab} h^b` for `ℂ[ℤ/n]` acting on itself, `ω = e^{2πi/n}`.
pub fn character_action(n: usize) -> Result<ActionData> {
    let w = crate::wha::groupoid_algebra(&crate::wha::Groupoid::cyclic(n))?.certify(0.0);
    let target = w.algebra().clone();
    let ops = (0..n)
        .map(|a| {
            CMat::from_fn(n, n, |i, j| {
                if i == j {
                    C64::from_polar(1.0, 2.0 * std::f64::consts::PI * (a * j) as f64 / n as f64)
                } else {
                    ZERO
                }
            })
        })
        .collect();
    ActionData::new(w, target, ops)
}
