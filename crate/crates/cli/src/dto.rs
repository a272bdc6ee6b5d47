//! JSON shapes for every object the CLI reads or writes. Complex numbers are
//! `[re, im]`; matrices are row-major.

use kackit::bases::{PPBasis, Side};
use kackit::commsq::CommutingSquare;
use kackit::crossprod::{ActionData, CrossedProductData};
use kackit::wha::{Certification, Groupoid, WeakHopfAlgebra};
use kackit::{AlgElem, CMat, CVec, InclusionMatrix, MultiMatrix, StarAlgebraPresentation, TraceState, UnitalEmbedding, C64};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub type Cx = [f64; 2];
pub type Matrix = Vec<Vec<Cx>>;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Object {
    Algebra(AlgebraDto),
    Embedding(EmbeddingDto),
    Trace(TraceDto),
    Element(ElementDto),
    Basis(BasisDto),
    Square(SquareDto),
    Presentation(PresentationDto),
    Wha(WhaDto),
    Groupoid(GroupoidDto),
    Action(ActionDto),
    CrossedProduct(CrossedProductDto),
    Tower(TowerDto),
    BasicConstruction(BasicConstructionDto),
}

impl Object {
    pub fn kind(&self) -> &'static str {
        match self {
            Object::Algebra(_) => "algebra",
            Object::Embedding(_) => "embedding",
            Object::Trace(_) => "trace",
            Object::Element(_) => "element",
            Object::Basis(_) => "basis",
            Object::Square(_) => "square",
            Object::Presentation(_) => "presentation",
            Object::Wha(_) => "wha",
            Object::Groupoid(_) => "groupoid",
            Object::Action(_) => "action",
            Object::CrossedProduct(_) => "crossed_product",
            Object::Tower(_) => "tower",
            Object::BasicConstruction(_) => "basic_construction",
        }
    }
}

pub fn c(z: C64) -> Cx {
    [z.re, z.im]
}

pub fn z(x: Cx) -> C64 {
    C64::new(x[0], x[1])
}

pub fn mat_out(m: &CMat) -> Matrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| c(m[(i, j)])).collect()).collect()
}

pub fn mat_in(m: &Matrix, path: &str) -> Result<CMat, CliError> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    if m.iter().any(|r| r.len() != cols) {
        return Err(CliError::input(path, "rows have different lengths"));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| z(m[i][j])))
}

pub fn flat_out(m: &CMat) -> Vec<Cx> {
    let mut v = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            v.push(c(m[(i, j)]));
        }
    }
    v
}

pub fn flat_in(v: &[Cx], rows: usize, cols: usize, path: &str) -> Result<CMat, CliError> {
    if v.len() != rows * cols {
        return Err(CliError::input(path, &format!("expected {} entries, found {}", rows * cols, v.len())));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| z(v[i * cols + j])))
}

pub fn vec_out(v: &CVec) -> Vec<Cx> {
    v.iter().map(|&x| c(x)).collect()
}

pub fn vec_in(v: &[Cx], n: usize, path: &str) -> Result<CVec, CliError> {
    if v.len() != n {
        return Err(CliError::input(path, &format!("expected {n} entries, found {}", v.len())));
    }
    Ok(CVec::from_iterator(n, v.iter().map(|&x| z(x))))
}

pub fn algebra_in(blocks: &[usize], path: &str) -> Result<MultiMatrix, CliError> {
    MultiMatrix::new(blocks.to_vec()).map_err(|e| CliError::core(path, e))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AlgebraDto {
    pub blocks: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingDto {
    pub source: Vec<usize>,
    pub target: Vec<usize>,
    /// Inclusion matrix, rows indexed by target blocks; builds the standard
    /// embedding.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<Vec<usize>>>,
    /// `dim(target) × dim(source)` coordinate matrix.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Matrix>,
}

impl EmbeddingDto {
    pub fn from_core(e: &UnitalEmbedding) -> Self {
        Self {
            source: e.source().block_dims().to_vec(),
            target: e.target().block_dims().to_vec(),
            multiplicities: None,
            matrix: Some(mat_out(e.matrix())),
        }
    }

    pub fn to_core(&self, path: &str, tol: f64) -> Result<UnitalEmbedding, CliError> {
        let src = algebra_in(&self.source, &format!("{path}.source"))?;
        let tgt = algebra_in(&self.target, &format!("{path}.target"))?;
        match (&self.multiplicities, &self.matrix) {
            (_, Some(m)) => {
                let mp = format!("{path}.matrix");
                let map = mat_in(m, &mp)?;
                UnitalEmbedding::from_matrix(src, tgt, map, tol).map_err(|e| CliError::core(&mp, e))
            }
            (Some(rows), None) => {
                let mp = format!("{path}.multiplicities");
                let lam = InclusionMatrix::from_rows(rows).map_err(|e| CliError::core(&mp, e))?;
                UnitalEmbedding::from_multiplicities(src, tgt, &lam).map_err(|e| CliError::core(&mp, e))
            }
            (None, None) => Err(CliError::input(path, "needs either `multiplicities` or `matrix`")),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceDto {
    pub algebra: Vec<usize>,
    pub weights: Vec<f64>,
}

impl TraceDto {
    pub fn from_core(t: &TraceState) -> Self {
        Self { algebra: t.block_dims().to_vec(), weights: t.weights().to_vec() }
    }

    pub fn to_core(&self, path: &str) -> Result<TraceState, CliError> {
        let a = algebra_in(&self.algebra, &format!("{path}.algebra"))?;
        TraceState::new(&a, self.weights.clone()).map_err(|e| CliError::core(&format!("{path}.weights"), e))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElementDto {
    pub blocks: Vec<Matrix>,
}

pub fn element_out(x: &AlgElem) -> Vec<Matrix> {
    x.blocks.iter().map(mat_out).collect()
}

pub fn element_in(blocks: &[Matrix], path: &str) -> Result<AlgElem, CliError> {
    let bs = blocks
        .iter()
        .enumerate()
        .map(|(i, b)| mat_in(b, &format!("{path}[{i}]")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(AlgElem::from_blocks(bs))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisDto {
    pub embedding: EmbeddingDto,
    /// Weights of the trace on the ambient algebra.
    pub trace: Vec<f64>,
    pub side: String,
    #[serde(default)]
    pub orthonormal: bool,
    #[serde(default)]
    pub unitary: bool,
    pub elements: Vec<Vec<Matrix>>,
}

impl BasisDto {
    pub fn from_core(b: &PPBasis) -> Self {
        Self {
            embedding: EmbeddingDto::from_core(&b.embedding),
            trace: b.trace.weights().to_vec(),
            side: b.side.as_str().to_string(),
            orthonormal: b.orthonormal,
            unitary: b.unitary,
            elements: b.elements.iter().map(element_out).collect(),
        }
    }

    pub fn to_core(&self, path: &str, tol: f64) -> Result<PPBasis, CliError> {
        let emb = self.embedding.to_core(&format!("{path}.embedding"), tol)?;
        let tp = format!("{path}.trace");
        let trace = TraceState::new(emb.target(), self.trace.clone()).map_err(|e| CliError::core(&tp, e))?;
        let side = match self.side.as_str() {
            "left" => Side::Left,
            "right" => Side::Right,
            "two-sided" | "two_sided" => Side::TwoSided,
            other => return Err(CliError::input(&format!("{path}.side"), &format!("unknown side `{other}`"))),
        };
        let elements = self
            .elements
            .iter()
            .enumerate()
            .map(|(i, e)| element_in(e, &format!("{path}.elements[{i}]")))
            .collect::<Result<Vec<_>, _>>()?;
        let mut b = PPBasis::new(emb, trace, elements, side).map_err(|e| CliError::core(&format!("{path}.elements"), e))?;
        b.orthonormal = self.orthonormal;
        b.unitary = self.unitary;
        Ok(b)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SquareDto {
    pub n_into_k: EmbeddingDto,
    pub n_into_l: EmbeddingDto,
    pub k_into_m: EmbeddingDto,
    pub l_into_m: EmbeddingDto,
    /// Weights of the trace on `M`.
    pub trace: Vec<f64>,
    /// A right basis of `K` over `N`, for `square transfer`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Box<BasisDto>>,
}

impl SquareDto {
    pub fn from_core(sq: &CommutingSquare, basis: Option<&PPBasis>) -> Self {
        Self {
            n_into_k: EmbeddingDto::from_core(&sq.n_into_k),
            n_into_l: EmbeddingDto::from_core(&sq.n_into_l),
            k_into_m: EmbeddingDto::from_core(&sq.k_into_m),
            l_into_m: EmbeddingDto::from_core(&sq.l_into_m),
            trace: sq.trace.weights().to_vec(),
            basis: basis.map(|b| Box::new(BasisDto::from_core(b))),
        }
    }

    pub fn to_core(&self, path: &str, tol: f64) -> Result<CommutingSquare, CliError> {
        let nk = self.n_into_k.to_core(&format!("{path}.n_into_k"), tol)?;
        let nl = self.n_into_l.to_core(&format!("{path}.n_into_l"), tol)?;
        let km = self.k_into_m.to_core(&format!("{path}.k_into_m"), tol)?;
        let lm = self.l_into_m.to_core(&format!("{path}.l_into_m"), tol)?;
        let tp = format!("{path}.trace");
        let trace = TraceState::new(km.target(), self.trace.clone()).map_err(|e| CliError::core(&tp, e))?;
        CommutingSquare::new(nk, nl, km, lm, trace, tol).map_err(|e| CliError::core(path, e))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentationDto {
    pub dim: usize,
    /// Structure constants, index `(i·d + j)·d + l`.
    pub m: Vec<Cx>,
    pub unit: Vec<Cx>,
    /// `x* = star · conj(x)`, row-major `d × d`.
    pub star: Vec<Cx>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trace: Option<Vec<Cx>>,
}

impl PresentationDto {
    pub fn from_core(p: &StarAlgebraPresentation) -> Self {
        Self {
            dim: p.dim(),
            m: p.structure().iter().map(|&x| c(x)).collect(),
            unit: vec_out(p.unit()),
            star: flat_out(p.involution()),
            trace: p.attached_trace().map(vec_out),
        }
    }

    pub fn to_core(&self, path: &str, tol: f64) -> Result<StarAlgebraPresentation, CliError> {
        let d = self.dim;
        if self.m.len() != d * d * d {
            return Err(CliError::input(&format!("{path}.m"), &format!("expected {} entries", d * d * d)));
        }
        let unit = vec_in(&self.unit, d, &format!("{path}.unit"))?;
        let star = flat_in(&self.star, d, d, &format!("{path}.star"))?;
        let trace = match &self.trace {
            Some(t) => Some(vec_in(t, d, &format!("{path}.trace"))?),
            None => None,
        };
        let structure = self.m.iter().map(|&x| z(x)).collect();
        StarAlgebraPresentation::new(d, structure, unit, star, trace, tol).map_err(|e| CliError::core(path, e))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WhaDto {
    pub dim: usize,
    pub m: Vec<Cx>,
    pub unit: Vec<Cx>,
    pub star: Vec<Cx>,
    /// Row-major `d² × d`.
    #[serde(rename = "Delta")]
    pub delta: Vec<Cx>,
    pub eps: Vec<Cx>,
    /// Row-major `d × d`.
    #[serde(rename = "S")]
    pub antipode: Vec<Cx>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub status: Option<String>,
}

impl WhaDto {
    pub fn from_core(w: &WeakHopfAlgebra) -> Self {
        let p = PresentationDto::from_core(w.algebra());
        Self {
            dim: p.dim,
            m: p.m,
            unit: p.unit,
            star: p.star,
            delta: flat_out(w.delta()),
            eps: vec_out(w.eps()),
            antipode: flat_out(w.antipode()),
            status: (w.status() != Certification::Pending).then(|| w.status().to_string()),
        }
    }

    /// Parses and certifies.
    pub fn to_core(&self, path: &str, tol: f64) -> Result<WeakHopfAlgebra, CliError> {
        let d = self.dim;
        if self.m.len() != d * d * d {
            return Err(CliError::input(&format!("{path}.m"), &format!("expected {} entries", d * d * d)));
        }
        let unit = vec_in(&self.unit, d, &format!("{path}.unit"))?;
        let star = flat_in(&self.star, d, d, &format!("{path}.star"))?;
        let structure = self.m.iter().map(|&x| z(x)).collect();
        let algebra = StarAlgebraPresentation::new_unchecked(d, structure, unit, star, None)
            .map_err(|e| CliError::core(path, e))?;
        let delta = flat_in(&self.delta, d * d, d, &format!("{path}.Delta"))?;
        let eps = vec_in(&self.eps, d, &format!("{path}.eps"))?;
        let s = flat_in(&self.antipode, d, d, &format!("{path}.S"))?;
        let w = WeakHopfAlgebra::new(algebra, delta, eps, s).map_err(|e| CliError::core(path, e))?;
        Ok(w.certify(tol))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismDto {
    pub id: usize,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupoidDto {
    pub objects: usize,
    pub morphisms: Vec<MorphismDto>,
    /// Triples `[g, h, g∘h]` for every composable pair.
    pub compose: Vec<[usize; 3]>,
    pub inverse: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl GroupoidDto {
    pub fn from_core(g: &Groupoid) -> Self {
        let n = g.morphisms();
        let mut compose = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if let Some(k) = g.compose(a, b) {
                    compose.push([a, b, k]);
                }
            }
        }
        Self {
            objects: g.objects(),
            morphisms: (0..n).map(|m| MorphismDto { id: m, src: g.src(m), tgt: g.tgt(m) }).collect(),
            compose,
            inverse: (0..n).map(|m| g.inverse(m)).collect(),
            name: Some(g.name().to_string()),
        }
    }

    pub fn to_core(&self, path: &str) -> Result<Groupoid, CliError> {
        let n = self.morphisms.len();
        let mut src = vec![0; n];
        let mut tgt = vec![0; n];
        for (i, m) in self.morphisms.iter().enumerate() {
            if m.id >= n {
                return Err(CliError::input(&format!("{path}.morphisms[{i}].id"), "id out of range"));
            }
            src[m.id] = m.src;
            tgt[m.id] = m.tgt;
        }
        let mut compose = vec![None; n * n];
        for (i, &[g, h, k]) in self.compose.iter().enumerate() {
            if g >= n || h >= n {
                return Err(CliError::input(&format!("{path}.compose[{i}]"), "morphism out of range"));
            }
            compose[g * n + h] = Some(k);
        }
        let g = Groupoid::new(self.objects, src, tgt, compose, self.inverse.clone())
            .map_err(|e| CliError::core(path, e))?;
        Ok(match &self.name {
            Some(s) => g.with_name(s.clone()),
            None => g,
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetDto {
    Algebra(AlgebraDto),
    Presentation(PresentationDto),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ActionDto {
    pub wha: WhaDto,
    pub target: TargetDto,
    /// `a ▷ e_x = Σ_y tensor[(a·m + x)·m + y] e_y`.
    pub tensor: Vec<Cx>,
}

impl ActionDto {
    pub fn from_core(a: &ActionData) -> Self {
        Self {
            wha: WhaDto::from_core(a.acting()),
            target: TargetDto::Presentation(PresentationDto::from_core(a.target())),
            tensor: a.to_tensor().into_iter().map(c).collect(),
        }
    }

    pub fn to_core(&self, path: &str, tol: f64) -> Result<ActionData, CliError> {
        let w = self.wha.to_core(&format!("{path}.wha"), tol)?;
        let tp = format!("{path}.target");
        let target = match &self.target {
            TargetDto::Algebra(a) => StarAlgebraPresentation::from_multi_matrix(&algebra_in(&a.blocks, &tp)?, None),
            TargetDto::Presentation(p) => p.to_core(&tp, tol)?,
        };
        let tensor: Vec<C64> = self.tensor.iter().map(|&x| z(x)).collect();
        ActionData::from_tensor(w, target, &tensor).map_err(|e| CliError::core(&format!("{path}.tensor"), e))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossedProductDto {
    pub result: PresentationDto,
    /// `dim(result) × dim(M)`.
    pub embed_m: Matrix,
    /// `dim(result) × dim(A)`.
    pub embed_a: Matrix,
    pub acting: WhaDto,
    pub relation_rank: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blocks: Option<Vec<usize>>,
}

impl CrossedProductDto {
    pub fn from_core(cp: &CrossedProductData, blocks: Option<Vec<usize>>) -> Self {
        Self {
            result: PresentationDto::from_core(&cp.result),
            embed_m: mat_out(&cp.embed_m),
            embed_a: mat_out(&cp.embed_a),
            acting: WhaDto::from_core(cp.acting()),
            relation_rank: cp.relation_rank,
            blocks,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TowerDto {
    pub beta: f64,
    /// Inclusion matrices of the relative-commutant tower, lowest first.
    pub matrices: Vec<Vec<Vec<usize>>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasicConstructionDto {
    pub lower: EmbeddingDto,
    pub upper: EmbeddingDto,
    pub jones_projection: Vec<Matrix>,
    pub tau: f64,
    pub trace: TraceDto,
    pub extended_trace: TraceDto,
    pub is_markov: bool,
}
