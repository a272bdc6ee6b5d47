use std::fmt::Write as _;
use std::path::PathBuf;

use kackit::bases::{
    canonical_unitary_onb, dft_unitary_onb, fourier_lift, matrix_unit_onb, pauli_basis, standard_right_basis,
    sylvester_weyl_basis, verify_basis, verify_orthonormal, verify_unitary, PPBasis,
};
use kackit::commsq::{
    nondegeneracy_by_norms, popa_transfer, random_hadamard_square, random_tensor_square, verify_commuting,
    verify_nondegenerate,
};
use kackit::crossprod::{
    character_action, crossed_product, minimality_from_parts, swap_action, verify_action, ActionData,
};
use kackit::fdca::{
    basic_construction, consistency_check, depth_from_tower, index_formula, markov_trace_for, watatani_index,
    wedderburn, Depth,
};
use kackit::wha::{
    dual_wha, groupoid_algebra, is_biconnected, is_connected_wha, is_hopf, verify_antipode, verify_weak_bialgebra,
    verify_weak_kac, Certification, Groupoid, WeakHopfAlgebra,
};
use kackit::{
    ConditionalExpectation, InclusionMatrix, MultiMatrix, StarAlgebraPresentation, TraceState, UnitalEmbedding,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::dto::*;
use crate::error::CliError;
use crate::workspace::Workspace;
use crate::{
    ActionExample, AlgebraCmd, BasisCmd, BasisKind, Command, CrossedCmd, EmbedCmd, SquareCmd, SquareKind, WhaCmd,
};

/// Result of a command: pass/fail, human text and a JSON value.
pub struct Outcome {
    pub ok: bool,
    text: String,
    value: Value,
    /// The value is the command's product and is printed regardless of `--json`.
    product: bool,
}

impl Outcome {
    fn report(ok: bool, text: String, value: Value) -> Self {
        Self { ok, text, value, product: false }
    }

    fn product(obj: &Object, text: String) -> Self {
        Self { ok: true, text, value: serde_json::to_value(obj).expect("serializable"), product: true }
    }

    pub fn emit(&self, json: bool, quiet: bool) {
        if self.product {
            println!("{}", self.value);
            if !quiet && !json && !self.text.is_empty() {
                eprint!("{}", self.text);
            }
        } else if json {
            println!("{}", self.value);
        } else if !quiet {
            print!("{}", self.text);
        }
    }
}

/// Shortest decimal rendering at ten significant digits.
pub fn num(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !(1e-4..1e7).contains(&x.abs()) {
        return format!("{x:.3e}");
    }
    let digits = (9 - x.abs().log10().floor() as i32).max(0) as usize;
    let s = format!("{x:.digits$}");
    let s = if s.contains('.') { s.trim_end_matches('0').trim_end_matches('.').to_string() } else { s };
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

fn nums(xs: &[f64]) -> String {
    format!("({})", xs.iter().map(|&x| num(x)).collect::<Vec<_>>().join(", "))
}

fn wrong_kind(path: &str, want: &str, got: &Object) -> CliError {
    CliError::input(path, &format!("expected a {want} object, found {}", got.kind()))
}

fn src_name(p: &Option<PathBuf>) -> String {
    p.as_ref().map_or("<stdin>".into(), |p| p.display().to_string())
}

fn load_embedding(ws: &mut Workspace, p: &Option<PathBuf>) -> Result<UnitalEmbedding, CliError> {
    let name = src_name(p);
    match ws.load(p.as_deref())? {
        Object::Embedding(e) => e.to_core(&name, ws.tol),
        other => Err(wrong_kind(&name, "embedding", &other)),
    }
}

fn load_trace(ws: &mut Workspace, p: &Option<PathBuf>) -> Result<TraceState, CliError> {
    let name = src_name(p);
    match ws.load(p.as_deref())? {
        Object::Trace(t) => t.to_core(&name),
        other => Err(wrong_kind(&name, "trace", &other)),
    }
}

fn load_wha(ws: &mut Workspace, p: &Option<PathBuf>) -> Result<WeakHopfAlgebra, CliError> {
    let name = src_name(p);
    match ws.load(p.as_deref())? {
        Object::Wha(w) => w.to_core(&name, ws.tol),
        Object::Groupoid(g) => groupoid_algebra(&g.to_core(&name)?)
            .map(|w| w.certify(ws.tol))
            .map_err(|e| CliError::core(&name, e)),
        other => Err(wrong_kind(&name, "wha", &other)),
    }
}

fn require_kac(w: &WeakHopfAlgebra, name: &str) -> Result<(), CliError> {
    w.require_kac().map_err(|e| CliError::core(name, e))
}

fn trace_or_markov(
    ws: &mut Workspace,
    p: &Option<PathBuf>,
    emb: &UnitalEmbedding,
) -> Result<TraceState, CliError> {
    match p {
        Some(_) => {
            let t = load_trace(ws, p)?;
            t.check_on(emb.target()).map_err(|e| CliError::core(&src_name(p), e))?;
            Ok(t)
        }
        None => markov_trace_for(emb)
            .and_then(|m| m.trace_on(emb.target()))
            .map_err(|e| CliError::core("embedding", e)),
    }
}

fn markov_on_scalars(a: &MultiMatrix) -> Result<TraceState, CliError> {
    let emb = UnitalEmbedding::scalars_into(a);
    markov_trace_for(&emb).and_then(|m| m.trace_on(a)).map_err(|e| CliError::core("algebra", e))
}

pub fn run(ws: &mut Workspace, cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Algebra { cmd: AlgebraCmd::Info(i) } => algebra_info(ws, &i.file),
        Command::Embed { cmd: EmbedCmd::Matrix(i) } => embed_matrix(ws, &i.file),
        Command::Embed { cmd: EmbedCmd::Connected(i) } => {
            let e = load_embedding(ws, &i.file)?;
            let ok = e.is_connected();
            let text = format!("inclusion matrix {}\nconnected: {ok}\n", e.inclusion_matrix());
            Ok(Outcome::report(ok, text, json!({ "connected": ok, "inclusion_matrix": e.inclusion_matrix().rows() })))
        }
        Command::Markov { embedding } => markov(ws, embedding),
        Command::Expectation { embedding, trace, element } => expectation(ws, embedding, trace, element),
        Command::BasicConstruction { embedding, trace } => basic(ws, embedding, trace),
        Command::Watatani { trace, blocks } => watatani(ws, trace, blocks),
        Command::Depth(i) => depth(ws, &i.file),
        Command::IndexFormula { relcom_dim, weyl_order, index } => index_cmd(*relcom_dim, *weyl_order, *index),
        Command::Basis { cmd: BasisCmd::Generate { kind, n, blocks, embedding, trace } } => {
            basis_generate(ws, *kind, *n, blocks, embedding, trace)
        }
        Command::Basis { cmd: BasisCmd::Verify(i) } => basis_verify(ws, &i.file),
        Command::Square { cmd: SquareCmd::Generate { kind, n } } => square_generate(ws, *kind, *n),
        Command::Square { cmd: SquareCmd::Check { input, require_nondegenerate } } => {
            square_check(ws, &input.file, *require_nondegenerate)
        }
        Command::Square { cmd: SquareCmd::Transfer { input, basis } } => square_transfer(ws, &input.file, basis),
        Command::Wha { cmd: WhaCmd::Check(i) } => wha_check(ws, &i.file),
        Command::Wha { cmd: WhaCmd::Dual(i) } => {
            let name = src_name(&i.file);
            let w = load_wha(ws, &i.file)?;
            require_kac(&w, &name)?;
            let d = dual_wha(&w).map_err(|e| CliError::core(&name, e))?.certify(ws.tol);
            Ok(Outcome::product(&Object::Wha(WhaDto::from_core(&d)), format!("dual: {}\n", d.status())))
        }
        Command::Wha { cmd: WhaCmd::Groupoid { file, name, raw } } => wha_groupoid(ws, file, name, *raw),
        Command::Wha { cmd: WhaCmd::Biconnected(i) } => {
            let name = src_name(&i.file);
            let w = load_wha(ws, &i.file)?;
            require_kac(&w, &name)?;
            let conn = is_connected_wha(&w, ws.seed, ws.tol).map_err(|e| CliError::core(&name, e))?;
            let bi = is_biconnected(&w, ws.seed, ws.tol).map_err(|e| CliError::core(&name, e))?;
            let text = format!("connected: {conn}\nbiconnected: {bi}\n");
            Ok(Outcome::report(bi, text, json!({ "connected": conn, "biconnected": bi })))
        }
        Command::CrossedProduct { cmd: CrossedCmd::Build { input, example } } => cp_build(ws, &input.file, *example),
        Command::CrossedProduct { cmd: CrossedCmd::CheckMinimal(i) } => cp_minimal(ws, &i.file),
        Command::CrossedProduct { cmd: CrossedCmd::Action { example } } => {
            let act = example_action(ws, *example)?;
            Ok(Outcome::product(&Object::Action(ActionDto::from_core(&act)), String::new()))
        }
        Command::Bratteli { dot, input } => bratteli(ws, &input.file, *dot),
    }
}

fn algebra_info(ws: &mut Workspace, p: &Option<PathBuf>) -> Result<Outcome, CliError> {
    let name = src_name(p);
    let (pres, direct) = match ws.load(p.as_deref())? {
        Object::Algebra(a) => {
            let m = algebra_in(&a.blocks, &format!("{name}.blocks"))?;
            (None, Some(m))
        }
        Object::Presentation(pd) => (Some(pd.to_core(&name, ws.tol)?), None),
        Object::Wha(w) => (Some(w.to_core(&name, ws.tol)?.algebra().clone()), None),
        Object::CrossedProduct(cp) => (Some(cp.result.to_core(&format!("{name}.result"), ws.tol)?), None),
        other => return Err(wrong_kind(&name, "algebra, presentation, wha or crossed_product", &other)),
    };
    let (m, residual) = match (pres, direct) {
        (_, Some(m)) => (m, None),
        (Some(p), None) => {
            let wd = wedderburn(&p, ws.seed, ws.tol).map_err(|e| CliError::core(&name, e))?;
            (wd.algebra, Some(wd.residual))
        }
        _ => unreachable!(),
    };
    let mut text = format!("blocks: {:?}\ndimension: {}\ncenter dimension: {}\n", m.block_dims(), m.dim(), m.num_blocks());
    if let Some(r) = residual {
        let _ = writeln!(text, "wedderburn residual: {r:.2e}");
    }
    let value = json!({
        "blocks": m.block_dims(),
        "dim": m.dim(),
        "center_dim": m.num_blocks(),
        "commutative": m.is_commutative(),
        "wedderburn_residual": residual,
    });
    Ok(Outcome::report(true, text, value))
}

fn embed_matrix(ws: &mut Workspace, p: &Option<PathBuf>) -> Result<Outcome, CliError> {
    let e = load_embedding(ws, p)?;
    let lam = e.inclusion_matrix();
    let text = format!(
        "{:?} -> {:?}\ninclusion matrix {lam}\nconnected: {}\n",
        e.source().block_dims(),
        e.target().block_dims(),
        e.is_connected()
    );
    let value = json!({
        "embedding": serde_json::to_value(Object::Embedding(EmbeddingDto::from_core(&e))).expect("serializable"),
        "inclusion_matrix": lam.rows(),
        "connected": e.is_connected(),
    });
    Ok(Outcome::report(true, text, value))
}

fn markov(ws: &mut Workspace, p: &Option<PathBuf>) -> Result<Outcome, CliError> {
    let e = load_embedding(ws, p)?;
    let name = src_name(p);
    let mt = markov_trace_for(&e).map_err(|err| CliError::core(&name, err))?;
    let text = format!(
        "t = {}\n‖Λ‖² = {}\nsource weights = {}\nresidual = {:.2e}\n",
        nums(&mt.weights),
        num(mt.beta),
        nums(&mt.source_weights),
        mt.residual
    );
    let trace = TraceDto { algebra: e.target().block_dims().to_vec(), weights: mt.weights.clone() };
    let value = json!({
        "trace": serde_json::to_value(Object::Trace(trace)).expect("serializable"),
        "source_weights": mt.source_weights,
        "beta": mt.beta,
        "residual": mt.residual,
    });
    Ok(Outcome::report(true, text, value))
}

fn expectation(
    ws: &mut Workspace,
    emb: &Option<PathBuf>,
    trace: &Option<PathBuf>,
    element: &Option<PathBuf>,
) -> Result<Outcome, CliError> {
    let e = load_embedding(ws, emb)?;
    let tr = trace_or_markov(ws, trace, &e)?;
    let exp = ConditionalExpectation::new(&e, &tr).map_err(|err| CliError::core("expectation", err))?;
    let bimodule = exp.bimodule_residual();
    let idem = exp.is_idempotent();
    let ok = bimodule <= ws.tol.max(1e-9) && idem;
    let mut text = format!("bimodule residual: {bimodule:.2e}\nidempotent: {idem}\n");
    let mut value = json!({ "bimodule_residual": bimodule, "idempotent": idem });
    if element.is_some() {
        let name = src_name(element);
        let x = match ws.load(element.as_deref())? {
            Object::Element(el) => element_in(&el.blocks, &format!("{name}.blocks"))?,
            other => return Err(wrong_kind(&name, "element", &other)),
        };
        e.target().check_element(&x).map_err(|err| CliError::core(&name, err))?;
        let y = exp.apply(&x);
        let _ = writeln!(text, "E(x) = {:?}", element_out(&y));
        value["image"] = serde_json::to_value(Object::Element(ElementDto { blocks: element_out(&y) })).expect("serializable");
    }
    Ok(Outcome::report(ok, text, value))
}

fn basic(ws: &mut Workspace, emb: &Option<PathBuf>, trace: &Option<PathBuf>) -> Result<Outcome, CliError> {
    let e = load_embedding(ws, emb)?;
    let tr = trace_or_markov(ws, trace, &e)?;
    let bc = basic_construction(&e, &tr, ws.tol).map_err(|err| CliError::core("basic construction", err))?;
    let jr = bc.jones_residual().map_err(|err| CliError::core("basic construction", err))?;
    let ok = jr <= ws.tol.max(1e-9);
    let text = format!(
        "A1 blocks: {:?}\nupper inclusion matrix {}\ntau = {}\nMarkov: {}\nJones residual: {jr:.2e}\n",
        bc.a1().block_dims(),
        bc.upper.inclusion_matrix(),
        num(bc.tau),
        bc.is_markov
    );
    let dto = BasicConstructionDto {
        lower: EmbeddingDto::from_core(&bc.lower),
        upper: EmbeddingDto::from_core(&bc.upper),
        jones_projection: element_out(&bc.jones_projection),
        tau: bc.tau,
        trace: TraceDto::from_core(&bc.trace),
        extended_trace: TraceDto::from_core(&bc.extended_trace),
        is_markov: bc.is_markov,
    };
    let mut value = serde_json::to_value(Object::BasicConstruction(dto)).expect("serializable");
    value["jones_residual"] = json!(jr);
    Ok(Outcome::report(ok, text, value))
}

fn watatani(ws: &mut Workspace, trace: &Option<PathBuf>, blocks: &Option<Vec<usize>>) -> Result<Outcome, CliError> {
    let tr = match blocks {
        Some(b) => markov_on_scalars(&algebra_in(b, "--blocks")?)?,
        None => load_trace(ws, trace)?,
    };
    let w = watatani_index(&tr, ws.tol.max(1e-9));
    let text = match w.scalar {
        Some(s) => format!("index values {}\nscalar: {}\n", nums(&w.values), num(s)),
        None => format!("index values {}\nscalar: no\n", nums(&w.values)),
    };
    Ok(Outcome::report(w.is_scalar, text, json!({ "values": w.values, "is_scalar": w.is_scalar, "scalar": w.scalar })))
}

fn depth(ws: &mut Workspace, p: &Option<PathBuf>) -> Result<Outcome, CliError> {
    let name = src_name(p);
    let t = match ws.load(p.as_deref())? {
        Object::Tower(t) => t,
        other => return Err(wrong_kind(&name, "tower", &other)),
    };
    let mats = t
        .matrices
        .iter()
        .enumerate()
        .map(|(i, rows)| {
            InclusionMatrix::from_rows(rows).map_err(|e| CliError::core(&format!("{name}.matrices[{i}]"), e))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let d = depth_from_tower(&mats, t.beta, ws.tol.max(1e-9));
    Ok(match d {
        Depth::Finite(k) => Outcome::report(true, format!("depth: {k}\n"), json!({ "depth": k })),
        Depth::Undetermined => Outcome::report(false, "depth: undetermined\n".into(), json!({ "depth": null })),
    })
}

fn index_cmd(relcom: u64, weyl: Option<u64>, index: Option<u64>) -> Result<Outcome, CliError> {
    match (weyl, index) {
        (Some(g), None) => {
            let i = index_formula(g, relcom);
            Ok(Outcome::report(true, format!("[M:N] = {g} * {relcom} = {i}\n"), json!({ "index": i })))
        }
        (None, Some(i)) => {
            let r = consistency_check(i, relcom);
            let text = format!("consistent: {}\n{}\n", r.consistent, r.reason);
            let value = json!({
                "consistent": r.consistent,
                "weyl_order": r.weyl_order,
                "index_is_prime": r.index_is_prime,
                "reason": r.reason,
            });
            Ok(Outcome::report(r.consistent, text, value))
        }
        _ => Err(CliError::input("index-formula", "give exactly one of --weyl-order or --index")),
    }
}

fn basis_generate(
    ws: &mut Workspace,
    kind: BasisKind,
    n: Option<usize>,
    blocks: &Option<Vec<usize>>,
    emb: &Option<PathBuf>,
    trace: &Option<PathBuf>,
) -> Result<Outcome, CliError> {
    let need_n = || n.filter(|&k| k >= 1).ok_or_else(|| CliError::input("--n", "a positive size is required"));
    let need_blocks = || {
        blocks
            .as_ref()
            .ok_or_else(|| CliError::input("--blocks", "block sizes are required"))
            .and_then(|b| algebra_in(b, "--blocks"))
    };
    let tol = ws.tol;
    let b: PPBasis = match kind {
        BasisKind::Dft => dft_unitary_onb(need_n()?).map_err(|e| CliError::core("--n", e))?,
        BasisKind::Pauli => pauli_basis().map_err(|e| CliError::core("pauli", e))?,
        BasisKind::SylvesterWeyl => sylvester_weyl_basis(need_n()?).map_err(|e| CliError::core("--n", e))?,
        BasisKind::MatrixUnits => {
            let a = need_blocks()?;
            let tr = match trace {
                Some(_) => load_trace(ws, trace)?,
                None => markov_on_scalars(&a)?,
            };
            matrix_unit_onb(&a, &tr).map_err(|e| CliError::core("--blocks", e))?
        }
        BasisKind::Canonical => canonical_unitary_onb(&need_blocks()?).map_err(|e| CliError::core("--blocks", e))?,
        BasisKind::Standard => {
            let e = load_embedding(ws, emb)?;
            let tr = trace_or_markov(ws, trace, &e)?;
            standard_right_basis(&e, &tr, tol).map_err(|err| CliError::core("standard basis", err))?
        }
        BasisKind::Fourier => {
            let k = need_n()?;
            let inner = dft_unitary_onb(k).map_err(|e| CliError::core("--n", e))?;
            let bc = basic_construction(&inner.embedding, &inner.trace, tol)
                .map_err(|e| CliError::core("basic construction", e))?;
            fourier_lift(&inner, &bc, tol).map_err(|e| CliError::core("fourier lift", e))?
        }
    };
    let text = format!("{} {} elements, side {}\n", b.len(), b.ambient(), b.side.as_str());
    Ok(Outcome::product(&Object::Basis(BasisDto::from_core(&b)), text))
}

fn basis_verify(ws: &mut Workspace, p: &Option<PathBuf>) -> Result<Outcome, CliError> {
    let name = src_name(p);
    let b = match ws.load(p.as_deref())? {
        Object::Basis(b) => b.to_core(&name, ws.tol)?,
        other => return Err(wrong_kind(&name, "basis", &other)),
    };
    let tol = ws.tol;
    let side = verify_basis(&b, tol).map_err(|e| CliError::core(&name, e))?;
    let mut ok = side.ok;
    let mut text = format!("{} basis: {} (residual {:.2e})\n", b.side.as_str(), side.ok, side.residual);
    let mut value = json!({ "side": b.side.as_str(), "ok": side.ok, "residual": side.residual });
    if b.orthonormal {
        let o = verify_orthonormal(&b, tol).map_err(|e| CliError::core(&name, e))?;
        ok &= o.ok;
        let _ = writeln!(text, "orthonormal: {} (residual {:.2e})", o.ok, o.right_residual.max(o.left_residual));
        value["orthonormal"] = json!({ "ok": o.ok, "right_residual": o.right_residual, "left_residual": o.left_residual });
    }
    if b.unitary {
        let u = verify_unitary(&b, tol);
        ok &= u.ok;
        let _ = writeln!(text, "unitary: {} (residual {:.2e})", u.ok, u.residual);
        value["unitary"] = json!({ "ok": u.ok, "residual": u.residual });
    }
    value["verified"] = json!(ok);
    Ok(Outcome::report(ok, text, value))
}

fn square_generate(ws: &mut Workspace, kind: SquareKind, n: usize) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(ws.seed);
    let (sq, b) = match kind {
        SquareKind::Tensor => {
            if n < 4 {
                return Err(CliError::input("--n", "tensor squares need a dimension bound of at least 4"));
            }
            random_tensor_square(&mut rng, n)
        }
        SquareKind::Hadamard => {
            if n < 1 {
                return Err(CliError::input("--n", "size must be positive"));
            }
            random_hadamard_square(&mut rng, n)
        }
    };
    let text = format!("M = {}, basis of {} elements\n", sq.m(), b.len());
    Ok(Outcome::product(&Object::Square(SquareDto::from_core(&sq, Some(&b))), text))
}

fn load_square(ws: &mut Workspace, p: &Option<PathBuf>) -> Result<(kackit::commsq::CommutingSquare, Option<Box<BasisDto>>), CliError> {
    let name = src_name(p);
    match ws.load(p.as_deref())? {
        Object::Square(s) => Ok((s.to_core(&name, ws.tol)?, s.basis)),
        other => Err(wrong_kind(&name, "square", &other)),
    }
}

fn square_check(ws: &mut Workspace, p: &Option<PathBuf>, require_nd: bool) -> Result<Outcome, CliError> {
    let (sq, _) = load_square(ws, p)?;
    let name = src_name(p);
    let c = verify_commuting(&sq, ws.tol).map_err(|e| CliError::core(&name, e))?;
    let nd = verify_nondegenerate(&sq, ws.tol);
    let norms = nondegeneracy_by_norms(&sq, ws.tol).ok();
    let ok = c.ok && (!require_nd || nd.ok);
    let mut text = format!(
        "commuting: {} (residual {:.2e})\nnon-degenerate: {} (rank span LK = {}, span KL = {}, dim M = {})\n",
        c.ok, c.residual, nd.ok, nd.rank_lk, nd.rank_kl, nd.dim_m
    );
    if let Some(n) = &norms {
        let _ = writeln!(text, "‖Λ‖² = {}, ‖Γ‖² = {}", num(n.lambda_norm_sq), num(n.gamma_norm_sq));
    }
    let value = json!({
        "commuting": c.ok,
        "commuting_residual": c.residual,
        "nondegenerate": nd.ok,
        "rank_lk": nd.rank_lk,
        "rank_kl": nd.rank_kl,
        "dim_m": nd.dim_m,
        "norm_criterion": norms.map(|n| json!({ "ok": n.ok, "lambda_norm_sq": n.lambda_norm_sq, "gamma_norm_sq": n.gamma_norm_sq })),
    });
    Ok(Outcome::report(ok, text, value))
}

fn square_transfer(ws: &mut Workspace, p: &Option<PathBuf>, basis: &Option<PathBuf>) -> Result<Outcome, CliError> {
    let (sq, own) = load_square(ws, p)?;
    let name = src_name(p);
    let b = match basis {
        Some(_) => {
            let bn = src_name(basis);
            match ws.load(basis.as_deref())? {
                Object::Basis(b) => b.to_core(&bn, ws.tol)?,
                other => return Err(wrong_kind(&bn, "basis", &other)),
            }
        }
        None => own
            .ok_or_else(|| CliError::input(&format!("{name}.basis"), "no basis given"))?
            .to_core(&format!("{name}.basis"), ws.tol)?,
    };
    match popa_transfer(&sq, &b, ws.tol) {
        Ok(t) => {
            let text = format!("transferred {} elements\n", t.len());
            Ok(Outcome::product(&Object::Basis(BasisDto::from_core(&t)), text))
        }
        Err(
            e @ (kackit::Error::NotCommutingSquare { .. }
            | kackit::Error::DegenerateSquare(_)
            | kackit::Error::InputNotBasis { .. }
            | kackit::Error::TransferFailed { .. }),
        ) => Ok(Outcome::report(false, format!("refused: {e}\n"), json!({ "refused": e.to_string() }))),
        Err(e) => Err(CliError::core(&name, e)),
    }
}

fn report_lines(text: &mut String, title: &str, entries: &[(&str, f64)], tol: f64) -> Value {
    let _ = writeln!(text, "{title}:");
    let mut obj = serde_json::Map::new();
    for (k, v) in entries {
        let _ = writeln!(text, "  {:<40} {:<4} {v:.2e}", k, if *v <= tol { "ok" } else { "FAIL" });
        obj.insert((*k).to_string(), json!(v));
    }
    Value::Object(obj)
}

fn wha_check(ws: &mut Workspace, p: &Option<PathBuf>) -> Result<Outcome, CliError> {
    let w = load_wha(ws, p)?;
    let tol = ws.tol;
    let mut text = String::new();
    let b = report_lines(&mut text, "weak bialgebra", &verify_weak_bialgebra(&w).entries(), tol);
    let a = report_lines(&mut text, "antipode", &verify_antipode(&w).entries(), tol);
    let k = report_lines(&mut text, "weak Kac", &verify_weak_kac(&w).entries(), tol);
    let hopf = is_hopf(&w, tol);
    let _ = writeln!(text, "Hopf (Δ(1) = 1⊗1): {hopf}\nstatus: {}", w.status());
    let ok = w.status() == Certification::WeakKac;
    let value = json!({
        "weak_bialgebra": b,
        "antipode": a,
        "weak_kac": k,
        "hopf": hopf,
        "status": w.status().to_string(),
    });
    Ok(Outcome::report(ok, text, value))
}

pub fn named_groupoid(name: &str) -> Option<Groupoid> {
    let tail = |p: &str| name.strip_prefix(p).and_then(|s| s.parse::<usize>().ok()).filter(|&n| n >= 1);
    match name {
        "klein" => Some(Groupoid::klein_four()),
        "s3" => Some(Groupoid::symmetric3()),
        "d4" => Some(Groupoid::dihedral4()),
        "q8" => Some(Groupoid::quaternion()),
        _ => tail("discrete")
            .map(Groupoid::discrete)
            .or_else(|| tail("pair").map(Groupoid::pair))
            .or_else(|| tail("z").map(Groupoid::cyclic)),
    }
}

fn wha_groupoid(
    ws: &mut Workspace,
    file: &Option<PathBuf>,
    name: &Option<String>,
    raw: bool,
) -> Result<Outcome, CliError> {
    let g = match name {
        Some(n) => named_groupoid(n).ok_or_else(|| CliError::input("--name", &format!("unknown groupoid `{n}`")))?,
        None => {
            let src = src_name(file);
            match ws.load(file.as_deref())? {
                Object::Groupoid(g) => g.to_core(&src)?,
                other => return Err(wrong_kind(&src, "groupoid", &other)),
            }
        }
    };
    if raw {
        return Ok(Outcome::product(&Object::Groupoid(GroupoidDto::from_core(&g)), String::new()));
    }
    let w = groupoid_algebra(&g).map_err(|e| CliError::core("groupoid", e))?.certify(ws.tol);
    let text = format!("{}: {} morphisms, {} objects, {}\n", g.name(), g.morphisms(), g.objects(), w.status());
    Ok(Outcome::product(&Object::Wha(WhaDto::from_core(&w)), text))
}

fn example_action(ws: &Workspace, example: ActionExample) -> Result<ActionData, CliError> {
    match example {
        ActionExample::Swap => swap_action().map_err(|e| CliError::core("swap", e)),
        ActionExample::Character => character_action(2).map_err(|e| CliError::core("character", e)),
        ActionExample::CounitalPair => {
            let w = groupoid_algebra(&Groupoid::pair(2)).map_err(|e| CliError::core("pair", e))?.certify(ws.tol);
            ActionData::counital(w, ws.tol).map_err(|e| CliError::core("counital", e))
        }
    }
}

fn cp_build(ws: &mut Workspace, p: &Option<PathBuf>, example: Option<ActionExample>) -> Result<Outcome, CliError> {
    let name = src_name(p);
    let act: ActionData = match example {
        Some(ex) => example_action(ws, ex)?,
        None => match ws.load(p.as_deref())? {
            Object::Action(a) => a.to_core(&name, ws.tol)?,
            other => return Err(wrong_kind(&name, "action", &other)),
        },
    };
    let report = verify_action(&act, ws.tol);
    if !report.ok(ws.tol.max(1e-9)) {
        let mut text = String::new();
        report_lines(&mut text, "action", &report.entries(), ws.tol);
        let _ = writeln!(text, "acting algebra certified: {}", report.acting_certified);
        let _ = writeln!(text, "kernels of a->a>1 and eps_t agree: {}", report.unit_kernels_agree);
        return Ok(Outcome::report(false, text, json!({ "refused": "action failed verification" })));
    }
    let cp = crossed_product(&act, ws.tol).map_err(|e| CliError::core(&name, e))?;
    let blocks = wedderburn(&cp.result, ws.seed, ws.tol).ok().map(|w| w.algebra.block_dims().to_vec());
    let text = format!(
        "dim(M) = {}, dim(A) = {}, relation rank {}, dim(M ⋊ A) = {}\nblocks: {:?}\nwell-defined residual {:.2e}\n",
        act.target().dim(),
        act.acting().dim(),
        cp.relation_rank,
        cp.dim(),
        blocks,
        cp.well_defined_residual
    );
    Ok(Outcome::product(&Object::CrossedProduct(CrossedProductDto::from_core(&cp, blocks)), text))
}

fn cp_minimal(ws: &mut Workspace, p: &Option<PathBuf>) -> Result<Outcome, CliError> {
    let name = src_name(p);
    let (result, embed_a, acting): (StarAlgebraPresentation, kackit::CMat, WeakHopfAlgebra) =
        match ws.load(p.as_deref())? {
            Object::CrossedProduct(cp) => (
                cp.result.to_core(&format!("{name}.result"), ws.tol)?,
                mat_in(&cp.embed_a, &format!("{name}.embed_a"))?,
                cp.acting.to_core(&format!("{name}.acting"), ws.tol)?,
            ),
            Object::Action(a) => {
                let act = a.to_core(&name, ws.tol)?;
                let cp = crossed_product(&act, ws.tol).map_err(|e| CliError::core(&name, e))?;
                (cp.result.clone(), cp.embed_a.clone(), cp.acting().clone())
            }
            other => return Err(wrong_kind(&name, "crossed_product or action", &other)),
        };
    if embed_a.nrows() != result.dim() || embed_a.ncols() != acting.dim() {
        return Err(CliError::input(&format!("{name}.embed_a"), "shape does not match the result and acting algebra"));
    }
    let r = minimality_from_parts(&result, &embed_a, &acting, ws.tol);
    let text = format!(
        "dim A'∩(M⋊A) = {}\ndim A_s = {}\nminimal: {}\n",
        r.relative_commutant.ncols(),
        r.source_image.ncols(),
        r.minimal
    );
    let value = json!({
        "minimal": r.minimal,
        "relative_commutant_dim": r.relative_commutant.ncols(),
        "source_dim": r.source_image.ncols(),
    });
    Ok(Outcome::report(r.minimal, text, value))
}

/// Graphviz rendering of an inclusion matrix.
pub fn dot(lower: &[usize], upper: &[usize], lam: &InclusionMatrix) -> String {
    let mut s = String::from("graph bratteli {\n  rankdir=BT;\n  node [shape=circle];\n");
    let _ = writeln!(
        s,
        "  {{ rank=same; {} }}",
        (0..lower.len()).map(|j| format!("b{j} [label=\"{}\"];", lower[j])).collect::<Vec<_>>().join(" ")
    );
    let _ = writeln!(
        s,
        "  {{ rank=same; {} }}",
        (0..upper.len()).map(|i| format!("a{i} [label=\"{}\"];", upper[i])).collect::<Vec<_>>().join(" ")
    );
    for i in 0..lam.nrows() {
        for j in 0..lam.ncols() {
            let k = lam.get(i, j);
            if k > 0 {
                let _ = writeln!(s, "  b{j} -- a{i} [label=\"{k}\"];");
            }
        }
    }
    s.push_str("}\n");
    s
}

fn bratteli(ws: &mut Workspace, p: &Option<PathBuf>, as_dot: bool) -> Result<Outcome, CliError> {
    let e = load_embedding(ws, p)?;
    let lam = e.inclusion_matrix();
    let lower = e.source().block_dims().to_vec();
    let upper = e.target().block_dims().to_vec();
    let text = if as_dot {
        dot(&lower, &upper, lam)
    } else {
        format!("lower {:?}\nupper {:?}\ninclusion matrix {lam}\n", lower, upper)
    };
    let value = json!({ "lower": lower, "upper": upper, "inclusion_matrix": lam.rows(), "dot": dot(&lower, &upper, lam) });
    Ok(Outcome::report(true, text, value))
}
