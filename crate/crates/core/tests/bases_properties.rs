mod common;

use common::*;
use kackit::bases::{
    dft_matrix, dft_unitary_onb, flat_unitary_from_onb, fourier_lift, matrix_unit_onb, onb_from_flat_unitary,
    standard_right_basis, sylvester_weyl_basis, verify_left_basis, verify_orthonormal, verify_right_basis,
    verify_two_sided, PPBasis, Side,
};
use kackit::fdca::{basic_construction, markov_trace_for};
use kackit::linalg::{max_abs, random_unitary};
use kackit::{AlgElem, CMat, CVec, MultiMatrix, UnitalEmbedding, C64};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

const TOL: f64 = 1e-9;

fn phases(seed: u64, n: usize) -> CMat {
    let mut r = rng(seed);
    CMat::from_diagonal(&CVec::from_iterator(
        n,
        (0..n).map(|_| C64::from_polar(1.0, r.random_range(0.0..std::f64::consts::TAU))),
    ))
}

/// `D₁ F Π D₂` with random diagonal phases `Dᵢ` and a random permutation `Π`.
fn random_flat_unitary(seed: u64, n: usize) -> CMat {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng(seed ^ 7));
    let pi = CMat::from_fn(n, n, |i, j| if perm[j] == i { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) });
    phases(seed, n) * dft_matrix(n) * pi * phases(seed ^ 11, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn standard_basis_verifies((nb, rows) in inclusion_shape(), seed in any::<u64>()) {
        let emb = twisted_embedding(&nb, &rows, seed);
        let trace = random_trace(emb.target(), seed ^ 5);
        let b = standard_right_basis(&emb, &trace, TOL).unwrap();
        let check = verify_right_basis(&b, TOL).unwrap();
        prop_assert!(check.ok, "residual {:.2e}", check.residual);
    }

    #[test]
    fn matrix_units_are_two_sided(dims in prop::collection::vec(1..=3usize, 1..=3), seed in any::<u64>()) {
        let a = MultiMatrix::new(dims).unwrap();
        let b = matrix_unit_onb(&a, &random_trace(&a, seed)).unwrap();
        prop_assert!(verify_two_sided(&b, TOL).unwrap().ok);
        prop_assert!(verify_orthonormal(&b, TOL).unwrap().ok);
    }

    #[test]
    fn right_onb_over_scalars_is_left(n in 2..=4usize, seed in any::<u64>()) {
        let sw = sylvester_weyl_basis(n).unwrap();
        let u = random_unitary(&mut rng(seed), n);
        let elements: Vec<AlgElem> =
            sw.elements.iter().map(|x| AlgElem::from_blocks(vec![&u * &x.blocks[0]])).collect();
        let b = PPBasis::new(sw.embedding.clone(), sw.trace.clone(), elements, Side::Right).unwrap();
        prop_assert!(verify_right_basis(&b, TOL).unwrap().ok);
        prop_assert!(verify_left_basis(&b, TOL).unwrap().ok);
    }

    #[test]
    fn flat_unitaries_round_trip(n in 1..=8usize, seed in any::<u64>()) {
        let u = random_flat_unitary(seed, n);
        let b = onb_from_flat_unitary(&u, TOL).unwrap();
        prop_assert!(verify_two_sided(&b, TOL).unwrap().ok);
        let back = flat_unitary_from_onb(&b, TOL).unwrap();
        for i in 0..n {
            let overlap = u.column(i).dotc(&back.column(i));
            prop_assert!((overlap.norm() - 1.0).abs() <= TOL);
            let diff = back.column(i) - u.column(i) * (overlap / C64::new(overlap.norm(), 0.0));
            prop_assert!(diff.iter().all(|z| z.norm() <= TOL));
        }
    }

    #[test]
    fn fourier_lift_is_unitary_and_orthonormal(n in 2..=6usize, seed in any::<u64>()) {
        let b = onb_from_flat_unitary(&random_flat_unitary(seed, n), TOL).unwrap();
        let bc = basic_construction(&b.embedding, &b.trace, TOL).unwrap();
        let lift = fourier_lift(&b, &bc, TOL).unwrap();
        let one = bc.a1().one();
        for v in &lift.elements {
            prop_assert!((v * &v.adjoint()).distance(&one) <= TOL);
        }
        let orth = verify_orthonormal(&PPBasis { side: Side::Right, ..lift.clone() }, TOL).unwrap();
        prop_assert!(orth.right_residual <= TOL);
        prop_assert!(verify_two_sided(&lift, TOL).unwrap().ok);
    }

    #[test]
    fn orthonormal_count_is_the_index(dims in prop::collection::vec(1..=3usize, 1..=4)) {
        let a = MultiMatrix::new(dims).unwrap();
        let emb = UnitalEmbedding::scalars_into(&a);
        let mt = markov_trace_for(&emb).unwrap();
        let b = matrix_unit_onb(&a, &mt.trace_on(&a).unwrap()).unwrap();
        prop_assert!(verify_orthonormal(&b, TOL).unwrap().ok);
        prop_assert!((b.index_count() - mt.beta).abs() <= 1e-9 * mt.beta);
    }
}

#[test]
fn lift_for_c2_squares_to_one() {
    let b = dft_unitary_onb(2).unwrap();
    let bc = basic_construction(&b.embedding, &b.trace, TOL).unwrap();
    let lift = fourier_lift(&b, &bc, TOL).unwrap();
    for v in &lift.elements {
        let vv = &v.blocks[0] * v.blocks[0].adjoint();
        assert!(max_abs(&(vv - CMat::identity(2, 2))) <= 1e-15);
    }
}
