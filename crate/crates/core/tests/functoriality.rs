//! Functoriality checks on randomized composable data: the chain rule for
//! cotangent morphisms, and point pullbacks along ring morphisms.

use cinfty::cotangent::cotangent_morphism;
use cinfty::random::{random_expr, random_polynomial};
use cinfty::ring::{CosetVerdict, RingElement, RingMorphism, RingPresentation};
use cinfty::spectrum::{point_search, point_verify, pull_back_point};
use cinfty::SmoothExpr;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Entrywise verdicts for `Omega_{psi . phi} == Omega_psi . (Omega_phi
/// pushed along psi)`.
fn chain_rule_verdicts(phi: &RingMorphism, psi: &RingMorphism) -> Vec<CosetVerdict> {
    let composite = RingMorphism::compose(psi, phi).unwrap();
    let direct = cotangent_morphism(&composite).unwrap();
    let omega_psi = cotangent_morphism(psi).unwrap();
    let omega_phi = cotangent_morphism(phi).unwrap();
    let n_a = phi.source().num_gens();
    let n_b = psi.source().num_gens();
    let n_c = psi.target().num_gens();
    let mut verdicts = Vec::new();
    for j in 0..n_c {
        for i in 0..n_a {
            let mut product = psi.target().zero();
            for k in 0..n_b {
                let pushed = psi.apply(&omega_phi.matrix()[k][i]).unwrap();
                product = &product + &(&omega_psi.matrix()[j][k] * &pushed);
            }
            verdicts.push(
                direct.matrix()[j][i]
                    .equal_mod_ideal(&product)
                    .unwrap(),
            );
        }
    }
    verdicts
}

fn random_free_pair(
    rng: &mut ChaCha8Rng,
    polynomial_only: bool,
) -> (RingMorphism, RingMorphism) {
    let a = rng.gen_range(1usize..=2);
    let b = rng.gen_range(1usize..=2);
    let c = rng.gen_range(1usize..=2);
    let ra = RingPresentation::free("A", a);
    let rb = RingPresentation::free("B", b);
    let rc = RingPresentation::free("C", c);
    let phi_images: Vec<SmoothExpr> = (0..a)
        .map(|_| random_expr(rng, b, 2, polynomial_only))
        .collect();
    let psi_images: Vec<SmoothExpr> = (0..b)
        .map(|_| random_expr(rng, c, 2, polynomial_only))
        .collect();
    let phi = RingMorphism::new(&ra, &rb, phi_images).unwrap();
    let psi = RingMorphism::new(&rb, &rc, psi_images).unwrap();
    (phi, psi)
}

#[test]
fn chain_rule_is_proved_on_polynomial_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(211);
    for round in 0..20 {
        let (phi, psi) = random_free_pair(&mut rng, true);
        for v in chain_rule_verdicts(&phi, &psi) {
            assert_eq!(v, CosetVerdict::ProvedEqual, "round {round}");
        }
    }
}

#[test]
fn chain_rule_is_never_falsified_with_primitives() {
    let mut rng = ChaCha8Rng::seed_from_u64(223);
    for round in 0..20 {
        let (phi, psi) = random_free_pair(&mut rng, false);
        for v in chain_rule_verdicts(&phi, &psi) {
            assert!(
                !matches!(v, CosetVerdict::Falsified(_)),
                "round {round}: {v:?}"
            );
        }
    }
}

/// A random invertible integer change of coordinates as expressions.
fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> Vec<Vec<i64>> {
    match n {
        1 => vec![vec![*[-1i64, 1].get(rng.gen_range(0..2)).unwrap()]],
        2 => {
            let k = rng.gen_range(-2i64..=2);
            if rng.gen_bool(0.5) {
                vec![vec![1, k], vec![0, 1]]
            } else {
                vec![vec![0, 1], vec![1, k]]
            }
        }
        _ => unreachable!("test uses n <= 2"),
    }
}

fn linear_images(matrix: &[Vec<i64>], arity: usize) -> Vec<SmoothExpr> {
    matrix
        .iter()
        .map(|row| {
            let mut acc = SmoothExpr::zero(arity);
            for (j, &a) in row.iter().enumerate() {
                let term =
                    &SmoothExpr::from_int(arity, a) * &SmoothExpr::var(arity, j + 1).unwrap();
                acc = &acc + &term;
            }
            acc
        })
        .collect()
}

#[test]
fn pulled_back_points_verify_in_the_source() {
    // source C^inf(R^n)/(f), target C^inf(R^n)/(f o A) for an invertible
    // integer matrix A; the morphism sends x to A y, so target points map
    // to source points by the same linear rule
    let mut rng = ChaCha8Rng::seed_from_u64(227);
    let mut verified = 0;
    for _ in 0..25 {
        let n = rng.gen_range(1usize..=2);
        let p = random_polynomial(&mut rng, n, 3, 3);
        // shift so the origin is a zero: relations with empty real zero
        // sets would make the round vacuous
        let origin = vec![cinfty::Rational::from_integer(0.into()); n];
        let at_origin = p.eval::<cinfty::Rational>(&origin).unwrap();
        let mut f = p.to_expr();
        f = &f - &SmoothExpr::constant(n, at_origin);

        let matrix = random_unimodular(&mut rng, n);
        let images = linear_images(&matrix, n);
        let g = f.compose(&images, n).unwrap();

        let source = RingPresentation::new("src", n, vec![f]).unwrap();
        let target = RingPresentation::new("tgt", n, vec![g]).unwrap();
        let phi = RingMorphism::new(&source, &target, images).unwrap();

        let bounds = vec![(-2.0, 2.0); n];
        let points = point_search(&target, &bounds, 7, 1e-9).unwrap();
        for pt in &points {
            let pulled = pull_back_point(&phi, pt).unwrap();
            assert!(
                point_verify(&source, &pulled, 1e-7).is_ok(),
                "pullback of {:?} failed to verify",
                pt.coords()
            );
            verified += 1;
        }
    }
    assert!(verified >= 20, "only {verified} pullbacks exercised");
}

#[test]
fn quotient_refinement_identity_pulls_points_back() {
    // C^inf(R)/(x^2 - 1) refines to C^inf(R)/(x - 1) along the identity on
    // generators; points of the finer ring are points of the coarser one
    let x = SmoothExpr::var(1, 1).unwrap();
    let coarse =
        RingPresentation::new("coarse", 1, vec![&x.pow(2) - &SmoothExpr::one(1)]).unwrap();
    let fine = RingPresentation::new("fine", 1, vec![&x - &SmoothExpr::one(1)]).unwrap();
    let phi = RingMorphism::new(&coarse, &fine, vec![x]).unwrap();
    let points = point_search(&fine, &[(-4.0, 4.0)], 9, 1e-9).unwrap();
    assert_eq!(points.len(), 1);
    let pulled = pull_back_point(&phi, &points[0]).unwrap();
    let verified = point_verify(&coarse, &pulled, 1e-7).unwrap();
    assert!((verified.coords()[0] - 1.0).abs() <= 1e-9);
}

#[test]
fn composing_with_identity_preserves_images() {
    let mut rng = ChaCha8Rng::seed_from_u64(229);
    for _ in 0..10 {
        let (phi, _) = random_free_pair(&mut rng, false);
        let id_src = RingMorphism::identity(phi.source());
        let id_tgt = RingMorphism::identity(phi.target());
        let left = RingMorphism::compose(&phi, &id_src).unwrap();
        let right = RingMorphism::compose(&id_tgt, &phi).unwrap();
        let reps = |m: &RingMorphism| -> Vec<SmoothExpr> {
            m.images().iter().map(|e: &RingElement| e.rep().clone()).collect()
        };
        assert_eq!(reps(&left), reps(&phi));
        assert_eq!(reps(&right), reps(&phi));
    }
}
