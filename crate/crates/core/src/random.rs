//! Seeded generators for property tests.
//!
//! Everything here is driven by a caller-supplied [`Rng`], so test suites
//! seed a [`rand_chacha`] or similar generator and get reproducible
//! expression streams.  The shapes are tuned for the kernel's oracles: small
//! coefficients (so float and exact arithmetic stay comparable), bounded
//! depth (so jets stay well-conditioned), and an optional polynomial-only
//! mode (so exact rational oracles apply).
//!
//! [`rand_chacha`]: https://docs.rs/rand_chacha

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

use crate::expr::{Monomial, PolyNormalForm, Primitive, SmoothExpr};

const PRIMITIVES: [Primitive; 5] = [
    Primitive::Exp,
    Primitive::Sin,
    Primitive::Cos,
    Primitive::Atan,
    Primitive::Tanh,
];

/// A random nonzero rational with numerator in `-4..=4` and denominator in
/// `1..=4`.
pub fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> BigRational {
    let num = loop {
        let n = rng.gen_range(-4i64..=4);
        if n != 0 {
            break n;
        }
    };
    let den = rng.gen_range(1i64..=4);
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A random smooth expression of the given arity.
///
/// `max_depth` bounds the tree depth; with `polynomial_only` the five
/// primitives are never used, so the result has an exact polynomial normal
/// form.  Constants stay in `[-2, 2]`.
pub fn random_expr<R: Rng + ?Sized>(
    rng: &mut R,
    arity: usize,
    max_depth: u32,
    polynomial_only: bool,
) -> SmoothExpr {
    if max_depth == 0 || rng.gen_bool(0.25) {
        return random_leaf(rng, arity);
    }
    let choice = rng.gen_range(0u32..100);
    let sub = |rng: &mut R| random_expr(rng, arity, max_depth - 1, polynomial_only);
    match choice {
        0..=29 => {
            let n = rng.gen_range(2usize..=3);
            let parts: Vec<SmoothExpr> = (0..n).map(|_| sub(rng)).collect();
            SmoothExpr::sum(arity, &parts).expect("arities agree")
        }
        30..=54 => {
            let parts = [sub(rng), sub(rng)];
            SmoothExpr::product(arity, &parts).expect("arities agree")
        }
        55..=69 => sub(rng).pow(rng.gen_range(2u32..=3)),
        70..=79 => -&sub(rng),
        _ => {
            if polynomial_only {
                let parts = [sub(rng), sub(rng)];
                SmoothExpr::sum(arity, &parts).expect("arities agree")
            } else {
                let prim = PRIMITIVES[rng.gen_range(0..PRIMITIVES.len())];
                SmoothExpr::primitive(prim, &sub(rng))
            }
        }
    }
}

fn random_leaf<R: Rng + ?Sized>(rng: &mut R, arity: usize) -> SmoothExpr {
    if arity > 0 && rng.gen_bool(0.7) {
        let index = rng.gen_range(1..=arity);
        SmoothExpr::var(arity, index).expect("index in range")
    } else {
        let num = rng.gen_range(-2i64..=2);
        let den = rng.gen_range(1i64..=2);
        SmoothExpr::constant(arity, BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
}

/// A random polynomial in normal form: up to `max_terms` monomials of total
/// degree at most `max_degree`, with nonzero rational coefficients.
///
/// The zero polynomial is never returned (at least one term survives).
pub fn random_polynomial<R: Rng + ?Sized>(
    rng: &mut R,
    arity: usize,
    max_degree: u32,
    max_terms: usize,
) -> PolyNormalForm {
    let mut p = PolyNormalForm::zero(arity);
    let terms = rng.gen_range(1..=max_terms.max(1));
    for _ in 0..terms {
        let mut exps = vec![0u32; arity];
        let mut budget = rng.gen_range(0..=max_degree);
        for e in exps.iter_mut() {
            let take = rng.gen_range(0..=budget);
            *e = take;
            budget -= take;
        }
        p.insert_term(Monomial::new(exps), random_rational(rng));
    }
    if p.is_zero() {
        // coefficients may cancel; retry deterministically from the same rng
        return random_polynomial(rng, arity, max_degree, max_terms);
    }
    p
}

/// A random point in the box `[lo, hi]^arity`.
pub fn random_point<R: Rng + ?Sized>(rng: &mut R, arity: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..arity).map(|_| rng.gen_range(lo..=hi)).collect()
}
