#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::error::Error as StdError;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use kackit::bases::{
    clock_and_shift, dft_matrix, dft_unitary_onb, flat_unitary_from_onb, fourier_lift, onb_from_flat_unitary,
    pauli_basis, pauli_matrices, sylvester_weyl_basis, verify_orthonormal, verify_right_basis, verify_two_sided,
    verify_unitary, PPBasis,
};
use kackit::commsq::{popa_transfer, random_hadamard_square, random_tensor_square, CommutingSquare};
use kackit::crossprod::{character_action, crossed_product, swap_action, ActionData};
use kackit::fdca::{
    basic_construction, consistency_check, depth_from_tower, index_formula, is_basic_construction_triple,
    markov_trace_for, watatani_index, wedderburn, Depth,
};
use kackit::linalg::{max_abs, real};
use kackit::wha::{
    groupoid_algebra, is_biconnected, verify_antipode, verify_weak_bialgebra, verify_weak_kac, Groupoid,
};
use kackit::{
    AlgElem, CMat, ConditionalExpectation, Error, InclusionMatrix, MultiMatrix, StarAlgebraPresentation, TraceState,
    UnitalEmbedding, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, Box<dyn StdError>>;
type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+).into());
        }
    };
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("Markov trace on C^n is uniform", markov_uniform, Some(Duration::from_secs(1))),
        ("Pauli and Sylvester-Weyl bases", unitary_bases, None),
        ("flat unitary round trip", flat_round_trip, None),
        ("Fourier lift in the basic construction", fourier, None),
        ("basis transfer through commuting squares", transfer, None),
        ("Watatani index of Markov traces", watatani, None),
        ("groupoid algebras are weak Kac algebras", groupoid_zoo, None),
        ("crossed products", crossed_products, None),
        ("basic-construction triples and depth", triples_and_depth, None),
        ("index formula consistency", index_arithmetic, None),
    ];
    let mut failures = 0;
    let mut first_eight = Duration::ZERO;
    for (k, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let elapsed = start.elapsed();
        if k < 8 {
            first_eight += elapsed;
        }
        let verdict = match result {
            Ok(Ok(detail)) => match budget {
                Some(b) if elapsed > *b => Err(format!("{detail}; took {elapsed:.2?}, budget {b:?}")),
                _ => Ok(detail),
            },
            Ok(Err(e)) => Err(e.to_string()),
            Err(_) => Err("panicked".to_string()),
        };
        match verdict {
            Ok(detail) => println!("PASS {:>2} {name} ({elapsed:.2?}): {detail}", k + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {:>2} {name} ({elapsed:.2?}): {why}", k + 1);
            }
        }
    }
    println!("criteria 1-8 took {first_eight:.2?}");
    if first_eight > Duration::from_secs(60) {
        println!("FAIL runtime budget of 60 s for criteria 1-8 exceeded");
        failures += 1;
    }
    if failures > 0 {
        println!("{failures} acceptance failure(s)");
        std::process::exit(1);
    }
}

fn markov_uniform() -> Outcome {
    let mut worst = 0.0f64;
    for n in 1..=10 {
        let a = MultiMatrix::commutative(n)?;
        let mt = markov_trace_for(&UnitalEmbedding::scalars_into(&a))?;
        ensure!(mt.residual <= 1e-12, "n = {n}: eigen-residual {:.2e}", mt.residual);
        for &t in &mt.weights {
            worst = worst.max((t - 1.0 / n as f64).abs());
        }
        ensure!((mt.beta - n as f64).abs() <= 1e-12, "n = {n}: beta {}", mt.beta);
    }
    ensure!(worst <= 1e-12, "max deviation from 1/n is {worst:.2e}");
    Ok(format!("max |t - 1/n| = {worst:.1e}"))
}

/// `tr(x) = (1/n) Tr(x)` computed directly on matrices.
fn normalized_trace(x: &CMat) -> C64 {
    x.trace() / real(x.nrows() as f64)
}

fn unitary_bases() -> Outcome {
    let pauli = pauli_basis()?;
    ensure!(verify_two_sided(&pauli, 1e-12)?.ok, "Pauli set is not a two-sided basis");
    ensure!(verify_unitary(&pauli, 1e-12).ok, "Pauli set is not unitary");
    let (right, left) = verify_orthonormal(&pauli, 1e-12)?.scalar_grams().ok_or("Gram is not scalar")?;
    let i4 = CMat::identity(4, 4);
    ensure!(max_abs(&(&right - &i4)) <= 1e-12 && max_abs(&(&left - &i4)) <= 1e-12, "Pauli Gram is not I4");
    let sigma = pauli_matrices();
    let oracle = CMat::from_fn(4, 4, |i, j| normalized_trace(&(sigma[i].adjoint() * &sigma[j])));
    ensure!(max_abs(&(&oracle - &i4)) <= 1e-12, "direct Pauli Gram is not I4");

    let mut worst = 0.0f64;
    for n in 2..=6 {
        let b = sylvester_weyl_basis(n)?;
        ensure!(b.len() == n * n, "n = {n}: {} elements", b.len());
        let two = verify_two_sided(&b, 1e-9)?;
        ensure!(two.ok, "n = {n}: expansion residual {:.2e}", two.residual);
        let orth = verify_orthonormal(&b, 1e-9)?;
        ensure!(orth.ok, "n = {n}: Gram residual {:.2e}", orth.right_residual.max(orth.left_residual));
        ensure!(verify_unitary(&b, 1e-9).ok, "n = {n}: not unitary");
        worst = worst.max(two.residual).max(orth.right_residual).max(orth.left_residual);

        // independent Gram of {UⁱVʲ} from the clock and shift matrices
        let (u, v) = clock_and_shift(n);
        let mut words = Vec::new();
        for i in 0..n {
            for j in 0..n {
                words.push(u.pow(i as u32) * v.pow(j as u32));
            }
        }
        for (p, x) in words.iter().enumerate() {
            for (q, y) in words.iter().enumerate() {
                let g = normalized_trace(&(x.adjoint() * y));
                let expect = if p == q { 1.0 } else { 0.0 };
                ensure!((g - real(expect)).norm() <= 1e-9, "n = {n}: direct Gram entry ({p},{q}) = {g}");
            }
        }
    }
    Ok(format!("Sylvester-Weyl n = 2..6, worst residual {worst:.1e}"))
}

fn flat_round_trip() -> Outcome {
    let mut worst = 0.0f64;
    for n in 2..=8 {
        let f = dft_matrix(n);
        // the DFT is flat and unitary by its closed form
        let omega = C64::from_polar(1.0, -2.0 * std::f64::consts::PI / n as f64);
        for k in 0..n {
            for i in 0..n {
                let closed = omega.powu((k * i) as u32) / real((n as f64).sqrt());
                ensure!((f[(k, i)] - closed).norm() <= 1e-12, "DFT entry ({k},{i})");
            }
        }
        let onb = onb_from_flat_unitary(&f, 1e-9)?;
        ensure!(verify_two_sided(&onb, 1e-9)?.ok, "n = {n}: not a basis");
        ensure!(verify_orthonormal(&onb, 1e-9)?.ok, "n = {n}: not orthonormal");
        let back = flat_unitary_from_onb(&onb, 1e-9)?;
        for i in 0..n {
            let (a, b) = (f.column(i), back.column(i));
            let overlap = a.dotc(&b);
            let phase = overlap / real(overlap.norm());
            let res = (b - a * phase).iter().fold(0.0f64, |m, z| m.max(z.norm()));
            worst = worst.max(res);
        }
    }
    ensure!(worst <= 1e-9, "round-trip residual {worst:.2e}");
    Ok(format!("n = 2..8, worst residual up to column phases {worst:.1e}"))
}

fn with_markov_trace(b: PPBasis) -> Result<PPBasis, Box<dyn StdError>> {
    let trace = markov_trace_for(&b.embedding)?.trace_on(b.ambient())?;
    Ok(PPBasis { trace, ..b })
}

fn check_lift(b: PPBasis, label: &str) -> Result<PPBasis, Box<dyn StdError>> {
    let b = with_markov_trace(b)?;
    let bc = basic_construction(&b.embedding, &b.trace, 1e-9)?;
    let lift = fourier_lift(&b, &bc, 1e-9)?;
    ensure!(lift.unitary, "{label}: lifted family is not unitary");
    ensure!(lift.orthonormal, "{label}: lifted family is not orthonormal");
    let two = verify_two_sided(&lift, 1e-9)?;
    ensure!(two.ok, "{label}: two-sided residual {:.2e}", two.residual);
    Ok(lift)
}

fn fourier() -> Outcome {
    for n in 2..=6 {
        let lift = check_lift(dft_unitary_onb(n)?, &format!("C in C^{n}"))?;
        if n == 2 {
            let x = CMat::from_row_slice(2, 2, &[real(0.0), real(1.0), real(1.0), real(0.0)]);
            let v1 = &lift.elements[1];
            ensure!(v1.blocks.len() == 1, "A1 is not M2");
            let dev = max_abs(&(&v1.blocks[0] - x));
            ensure!(dev <= 1e-15, "v1 = {} is not [[0,1],[1,0]]", v1.blocks[0]);
        }
    }
    check_lift(pauli_basis()?, "C in M2")?;
    Ok("C in C^n for n = 2..6 and C in M2; v1 = [[0,1],[1,0]] to machine precision".into())
}

/// Transferred basis reconstructs random elements of `M` through `E_L`,
/// computed here from a fresh conditional expectation.
fn reconstruction_residual(sq: &CommutingSquare, basis: &PPBasis, rng: &mut ChaCha8Rng) -> Result<f64, Error> {
    let exp = ConditionalExpectation::new(&sq.l_into_m, &sq.trace)?;
    let mut worst = 0.0f64;
    for _ in 0..3 {
        let x = sq.m().random_element(rng);
        let mut sum = sq.m().zero();
        for l in &basis.elements {
            sum = &sum + &(l * &exp.apply_in_ambient(&(&l.adjoint() * &x)));
        }
        worst = worst.max(sum.distance(&x) / x.max_abs().max(1.0));
    }
    Ok(worst)
}

fn degenerate_squares() -> Result<Vec<CommutingSquare>, Error> {
    let c = MultiMatrix::scalars();
    let mut out = Vec::new();
    for n in 2..=5 {
        let m = MultiMatrix::full(n)?;
        let diag = MultiMatrix::commutative(n)?;
        let l_into_m =
            UnitalEmbedding::from_multiplicities(diag.clone(), m.clone(), &InclusionMatrix::from_rows(&[vec![1; n]])?)?;
        out.push(CommutingSquare::new(
            UnitalEmbedding::identity(&c),
            UnitalEmbedding::scalars_into(&diag),
            UnitalEmbedding::scalars_into(&m),
            l_into_m,
            TraceState::uniform(&m),
            1e-12,
        )?);
        out.push(CommutingSquare::new(
            UnitalEmbedding::identity(&c),
            UnitalEmbedding::identity(&c),
            UnitalEmbedding::scalars_into(&m),
            UnitalEmbedding::scalars_into(&m),
            TraceState::uniform(&m),
            1e-12,
        )?);
    }
    Ok(out)
}

fn transfer() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut oracle = 0.0f64;
    for k in 0..50 {
        let (sq, basis) = if k % 2 == 0 {
            random_tensor_square(&mut rng, 64)
        } else {
            let n = rng.random_range(2..=8usize);
            random_hadamard_square(&mut rng, n)
        };
        ensure!(sq.m().dim() <= 64, "square {k}: dim M = {}", sq.m().dim());
        let out = popa_transfer(&sq, &basis, 1e-9)?;
        let check = verify_right_basis(&out, 1e-9)?;
        ensure!(check.ok, "square {k}: residual {:.2e}", check.residual);
        worst = worst.max(check.residual);
        oracle = oracle.max(reconstruction_residual(&sq, &out, &mut rng)?);
    }
    ensure!(oracle <= 1e-9, "direct reconstruction residual {oracle:.2e}");
    let degenerate = degenerate_squares()?;
    for (k, sq) in degenerate.iter().enumerate() {
        match popa_transfer(sq, &dft_unitary_onb(1)?, 1e-9) {
            Err(Error::DegenerateSquare(_)) => {}
            other => return Err(format!("degenerate square {k} was not refused: {other:?}").into()),
        }
    }
    Ok(format!(
        "50 squares, worst residual {worst:.1e}, direct check {oracle:.1e}; {} degenerate squares refused",
        degenerate.len()
    ))
}

/// Nondecreasing block sizes with `Σ n² ≤ max`.
fn shapes(max: usize) -> Vec<Vec<usize>> {
    fn extend(prefix: &mut Vec<usize>, least: usize, room: usize, out: &mut Vec<Vec<usize>>) {
        if !prefix.is_empty() {
            out.push(prefix.clone());
        }
        let mut n = least;
        while n * n <= room {
            prefix.push(n);
            extend(prefix, n, room - n * n, out);
            prefix.pop();
            n += 1;
        }
    }
    let mut out = Vec::new();
    extend(&mut Vec::new(), 1, max, &mut out);
    out
}

/// `Σ u u*` over the quasi-basis `{e^b_{ij} / √t_b}` of `tr` over `ℂ`, after
/// confirming `x = Σ u tr(u* x)` on `x`. Matrix units of different blocks
/// are orthogonal, so everything is computed one block at a time.
fn quasi_basis_index(a: &MultiMatrix, weights: &[f64], x: &AlgElem) -> Result<Vec<f64>, String> {
    let mut values = Vec::new();
    for (b, &n) in a.block_dims().iter().enumerate() {
        let t = weights[b];
        let unit = |i: usize, j: usize| {
            let mut e = CMat::zeros(n, n);
            e[(i, j)] = real(1.0 / t.sqrt());
            e
        };
        let mut recon = CMat::zeros(n, n);
        let mut index = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let u = unit(i, j);
                recon += &u * ((u.adjoint() * &x.blocks[b]).trace() * real(t));
                index += &u * u.adjoint();
            }
        }
        if max_abs(&(recon - &x.blocks[b])) > 1e-9 {
            return Err(format!("quasi-basis fails on block {b} of {a}"));
        }
        let c = index[(0, 0)];
        if max_abs(&(&index - CMat::identity(n, n) * c)) > 1e-9 {
            return Err(format!("quasi-basis sum is not central on {a}"));
        }
        values.push(c.re);
    }
    Ok(values)
}

fn watatani() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let all = shapes(50);
    let mut perturbed = 0;
    for dims in &all {
        let a = MultiMatrix::new(dims.clone())?;
        let trace = markov_trace_for(&UnitalEmbedding::scalars_into(&a))?.trace_on(&a)?;
        let w = watatani_index(&trace, 1e-9);
        let d = a.dim() as f64;
        ensure!(w.is_scalar, "{a}: index values {:?}", w.values);
        ensure!((w.scalar.unwrap() - d).abs() <= 1e-8, "{a}: index {} != {d}", w.scalar.unwrap());
        let x = a.random_element(&mut rng);
        let oracle = quasi_basis_index(&a, trace.weights(), &x)?;
        for (p, q) in oracle.iter().zip(&w.values) {
            ensure!((p - q).abs() <= 1e-8 * d, "{a}: quasi-basis {p} vs {q}");
        }
        if dims.len() < 2 {
            continue;
        }
        for b in 0..dims.len() {
            for f in [1.05, 0.95] {
                let mut weights = trace.weights().to_vec();
                weights[b] *= f;
                let t = TraceState::normalized(&a, weights)?;
                ensure!(!watatani_index(&t, 1e-9).is_scalar, "{a}: perturbing block {b} by {f} went unnoticed");
                let oracle = quasi_basis_index(&a, t.weights(), &x)?;
                let spread = oracle.iter().cloned().fold(f64::MIN, f64::max)
                    - oracle.iter().cloned().fold(f64::MAX, f64::min);
                ensure!(spread > 1e-3, "{a}: quasi-basis oracle sees no perturbation");
                perturbed += 1;
            }
        }
    }
    Ok(format!("{} algebras, {perturbed} perturbations detected", all.len()))
}

fn is_abelian(g: &Groupoid) -> bool {
    (0..g.morphisms()).all(|a| (0..g.morphisms()).all(|b| g.compose(a, b) == g.compose(b, a)))
}

/// Groupoids with `k` morphisms up to isomorphism, `k ≤ max`, from the counts
/// of groups of order `≤ 6` and the decomposition into pair groupoids times
/// groups.
fn expected_groupoid_counts(max: usize) -> Vec<u64> {
    let groups = [0u64, 1, 1, 1, 2, 1, 2];
    let connected: Vec<u64> = (0..=max)
        .map(|k| {
            if k == 0 {
                return 0;
            }
            (1..=k).filter(|n| k % (n * n) == 0).map(|n| groups[k / (n * n)]).sum()
        })
        .collect();
    // multisets of connected components
    let mut count = vec![0u64; max + 1];
    count[0] = 1;
    for (size, &c) in connected.iter().enumerate().skip(1) {
        for _ in 0..c {
            for total in size..=max {
                count[total] += count[total - size];
            }
        }
    }
    count
}

fn groupoid_zoo() -> Outcome {
    let zoo = Groupoid::enumerate(6);
    let expected = expected_groupoid_counts(6);
    for (k, &e) in expected.iter().enumerate().skip(1) {
        let got = zoo.iter().filter(|g| g.morphisms() == k).count() as u64;
        ensure!(got == e, "{got} groupoids with {k} morphisms, expected {e}");
    }
    for order in 2..=6 {
        let groups: Vec<&Groupoid> = zoo.iter().filter(|g| g.is_group() && g.morphisms() == order).collect();
        ensure!(!groups.is_empty(), "no group of order {order}");
    }
    ensure!(
        zoo.iter().any(|g| g.is_group() && g.morphisms() == 6 && !is_abelian(g)),
        "S3 is missing"
    );
    for n in 1..=6 {
        ensure!(zoo.iter().any(|g| g.objects() == n && g.morphisms() == n), "discrete groupoid on {n} objects missing");
    }
    ensure!(zoo.iter().any(|g| g.objects() == 2 && g.morphisms() == 4 && !g.is_group()
        && (0..4).all(|m| g.src(m) != g.tgt(m) || g.identities().contains(&m))), "pair groupoid missing");
    let mut groups = 0;
    for g in &zoo {
        let w = groupoid_algebra(g)?.certify(0.0);
        let bi = verify_weak_bialgebra(&w).max();
        let an = verify_antipode(&w).max();
        let kac = verify_weak_kac(&w).max();
        ensure!(bi == 0.0 && an == 0.0 && kac == 0.0, "{}: residuals {bi:.1e} {an:.1e} {kac:.1e}", g.name());
        let biconnected = is_biconnected(&w, 1, 1e-9)?;
        ensure!(biconnected == g.is_group(), "{}: biconnected = {biconnected}", g.name());
        groups += g.is_group() as usize;
    }
    Ok(format!("{} groupoids ({groups} groups), every residual exactly 0", zoo.len()))
}

/// `g ▷ e_x = e_{gx}` on `ℂ^G`.
fn regular_action(g: &Groupoid) -> Result<ActionData, Error> {
    let w = groupoid_algebra(g)?.certify(0.0);
    let n = g.morphisms();
    let target = StarAlgebraPresentation::from_multi_matrix(&MultiMatrix::commutative(n)?, None);
    let ops = (0..n)
        .map(|a| {
            let mut op = CMat::zeros(n, n);
            for x in 0..n {
                op[(g.compose(a, x).expect("groups compose"), x)] = real(1.0);
            }
            op
        })
        .collect();
    ActionData::new(w, target, ops)
}

fn crossed_products() -> Outcome {
    let m2 = StarAlgebraPresentation::from_multi_matrix(&MultiMatrix::full(2)?, None);
    let mut cases: Vec<(String, ActionData, Vec<usize>)> = vec![("swap".into(), swap_action()?, vec![2])];
    for n in 2..=4 {
        cases.push((format!("characters of Z/{n}"), character_action(n)?, vec![n]));
    }
    for n in 2..=3 {
        let w = groupoid_algebra(&Groupoid::cyclic(n))?.certify(0.0);
        cases.push((format!("trivial Z/{n} on M2"), ActionData::trivial(w, m2.clone()), vec![2; n]));
    }
    let mut groups: Vec<Groupoid> = (2..=6).map(Groupoid::cyclic).collect();
    groups.push(Groupoid::klein_four());
    groups.push(Groupoid::symmetric3());
    for g in &groups {
        cases.push((format!("regular action of a group of order {}", g.morphisms()), regular_action(g)?, vec![g.morphisms()]));
    }
    let mut worst = 0.0f64;
    for (name, act, blocks) in &cases {
        let cp = crossed_product(act, 1e-9)?;
        let expect = act.target().dim() * act.acting().dim();
        ensure!(cp.dim() == expect, "{name}: dim {} != {expect}", cp.dim());
        let res = cp.result.residuals().max();
        let cov = cp.covariance_residual(act);
        ensure!(res <= 1e-9, "{name}: algebra residual {res:.2e}");
        ensure!(cov <= 1e-9, "{name}: covariance residual {cov:.2e}");
        ensure!(cp.well_defined_residual <= 1e-9, "{name}: quotient residual {:.2e}", cp.well_defined_residual);
        let wd = wedderburn(&cp.result, 3, 1e-9)?;
        let mut got = wd.algebra.block_dims().to_vec();
        got.sort_unstable();
        ensure!(&got == blocks, "{name}: blocks {got:?}, expected {blocks:?}");
        worst = worst.max(res).max(cov).max(cp.well_defined_residual).max(wd.residual);
    }
    Ok(format!("{} actions, worst residual {worst:.1e}", cases.len()))
}

fn random_inclusion(rng: &mut ChaCha8Rng) -> Result<UnitalEmbedding, Error> {
    loop {
        let kb = rng.random_range(1..=3usize);
        let ka = rng.random_range(1..=3usize);
        let nb: Vec<usize> = (0..kb).map(|_| rng.random_range(1..=2usize)).collect();
        let rows: Vec<Vec<usize>> =
            (0..ka).map(|_| (0..kb).map(|_| rng.random_range(0..=2usize)).collect()).collect();
        if rows.iter().any(|r| r.iter().all(|&m| m == 0)) || (0..kb).any(|j| rows.iter().all(|r| r[j] == 0)) {
            continue;
        }
        let na: Vec<usize> = rows.iter().map(|r| r.iter().zip(&nb).map(|(m, n)| m * n).sum()).collect();
        let upper: usize = (0..kb).map(|j| rows.iter().zip(&na).map(|(r, n)| r[j] * n).sum::<usize>().pow(2)).sum();
        let a = MultiMatrix::new(na)?;
        if a.dim() > 18 || upper > 60 {
            continue;
        }
        let lambda = InclusionMatrix::from_rows(&rows)?;
        return UnitalEmbedding::from_multiplicities(MultiMatrix::new(nb)?, a, &lambda);
    }
}

fn random_trace(rng: &mut ChaCha8Rng, a: &MultiMatrix) -> Result<TraceState, Error> {
    TraceState::normalized(a, (0..a.num_blocks()).map(|_| rng.random_range(0.2..1.0)).collect())
}

fn triples_and_depth() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..100 {
        let emb = random_inclusion(&mut rng)?;
        let trace = random_trace(&mut rng, emb.target())?;
        let bc = basic_construction(&emb, &trace, 1e-9)?;
        let report = is_basic_construction_triple(&bc.lower, &bc.upper, &bc.extended_trace, 1e-9)?;
        ensure!(report.is_basic_construction, "triple {k} rejected: {}", report.reason);
    }
    for k in 0..100 {
        let emb = random_inclusion(&mut rng)?;
        let mut rows = emb.inclusion_matrix().transpose().rows();
        if k % 2 == 0 {
            let i = rng.random_range(0..rows.len());
            let j = rng.random_range(0..rows[i].len());
            rows[i][j] += 1;
        } else {
            rows.iter_mut().flatten().for_each(|m| *m *= 2);
        }
        let a = emb.target();
        let dims: Vec<usize> = rows.iter().map(|r| r.iter().zip(a.block_dims()).map(|(m, n)| m * n).sum()).collect();
        let a1 = MultiMatrix::new(dims)?;
        let upper = UnitalEmbedding::from_multiplicities(a.clone(), a1.clone(), &InclusionMatrix::from_rows(&rows)?)?;
        let trace = random_trace(&mut rng, &a1)?;
        let report = is_basic_construction_triple(&emb, &upper, &trace, 1e-9)?;
        ensure!(!report.is_basic_construction, "shape-violating triple {k} accepted");
        ensure!(!report.transpose_shape, "shape-violating triple {k} passed the shape test");
    }
    for n in 2..=8 {
        let ones = InclusionMatrix::from_rows(&[vec![1; n]])?;
        let d = depth_from_tower(&[ones], n as f64, 1e-9);
        ensure!(d == Depth::Finite(2), "all-ones row of length {n}: {d:?}");
    }
    Ok("100 basic constructions accepted, 100 shape violations rejected, depth 2 for n = 2..8".into())
}

fn primes_below(n: u64) -> Vec<u64> {
    let mut sieve = vec![true; n as usize];
    let mut out = Vec::new();
    for p in 2..n as usize {
        if sieve[p] {
            out.push(p as u64);
            (p * p..n as usize).step_by(p).for_each(|q| sieve[q] = false);
        }
    }
    out
}

fn index_arithmetic() -> Outcome {
    let primes = primes_below(100);
    for &p in &primes {
        ensure!(index_formula(1, p) == p && index_formula(p, 1) == p, "index formula at {p}");
        for d in 2..=p {
            let r = consistency_check(p, d);
            ensure!(!r.consistent, "index {p} with dim {d} reported consistent");
        }
        ensure!(consistency_check(p, 1).consistent, "index {p} with trivial commutant rejected");
    }
    for n in 2..=10u64 {
        let r = consistency_check(n * n, n * n);
        ensure!(r.consistent && r.weyl_order == Some(1), "({}, {}) reported {:?}", n * n, n * n, r);
        ensure!(index_formula(1, n * n) == n * n, "index formula at {}", n * n);
    }
    Ok(format!("{} primes flagged, (n², n²) consistent for n = 2..10", primes.len()))
}
