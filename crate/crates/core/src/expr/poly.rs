//! Exact multivariate polynomial normal forms.
//!
//! A [`PolyNormalForm`] stores a polynomial as a map from exponent vectors to
//! nonzero big-rational coefficients, ordered by graded lexicographic order
//! (total degree first, then lexicographic with `x1` largest).  Two smooth
//! expressions with equal normal forms denote the same function; arithmetic
//! here is exact, so the normal form doubles as the kernel's decision
//! procedure for polynomial identities.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

use super::{nconst, nneg, npow, nprod, nsum, nvar, pow_scalar, EvalError, SmoothExpr};
use crate::scalar::Scalar;

/// Exponent vector of a monomial, ordered graded-lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    /// A monomial from its exponent vector.
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    /// The constant monomial in the given number of variables.
    pub fn unit(arity: usize) -> Self {
        Monomial(vec![0; arity])
    }

    /// Exponent of each variable.
    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    /// Sum of all exponents.
    pub fn total_degree(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Componentwise product (sum of exponents).
    pub fn mul(&self, other: &Monomial) -> Monomial {
        debug_assert_eq!(self.0.len(), other.0.len());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// True if `self` divides `other` componentwise.
    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.len() == other.0.len() && self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// Componentwise quotient; caller must ensure divisibility.
    pub fn quotient(&self, divisor: &Monomial) -> Monomial {
        debug_assert!(divisor.divides(self));
        Monomial(self.0.iter().zip(&divisor.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// All monomials in `arity` variables of total degree `< bound`, ascending in
/// graded lexicographic order.
pub fn monomials_below(arity: usize, bound: u32) -> Vec<Monomial> {
    let mut out = Vec::new();
    let mut current = vec![0u32; arity];
    collect_monomials(arity, bound, 0, 0, &mut current, &mut out);
    out.sort();
    out
}

fn collect_monomials(
    arity: usize,
    bound: u32,
    var: usize,
    used: u32,
    current: &mut Vec<u32>,
    out: &mut Vec<Monomial>,
) {
    if var == arity {
        out.push(Monomial(current.clone()));
        return;
    }
    for e in 0..(bound - used) {
        current[var] = e;
        collect_monomials(arity, bound, var + 1, used + e, current, out);
    }
    current[var] = 0;
}

/// A polynomial with exact rational coefficients in normal form: no zero
/// coefficients, terms keyed by graded-lexicographically ordered monomials.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyNormalForm {
    arity: usize,
    terms: BTreeMap<Monomial, BigRational>,
}

impl PolyNormalForm {
    /// The zero polynomial.
    pub fn zero(arity: usize) -> Self {
        PolyNormalForm {
            arity,
            terms: BTreeMap::new(),
        }
    }

    /// A constant polynomial.
    pub fn constant(arity: usize, value: BigRational) -> Self {
        let mut p = Self::zero(arity);
        p.insert_term(Monomial::unit(arity), value);
        p
    }

    /// The variable `x{index}` (1-based) as a polynomial.
    pub fn var(arity: usize, index: usize) -> Self {
        assert!(index >= 1 && index <= arity, "variable index out of range");
        let mut exps = vec![0u32; arity];
        exps[index - 1] = 1;
        let mut p = Self::zero(arity);
        p.insert_term(Monomial(exps), BigRational::one());
        p
    }

    /// Number of variables.
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// True if this is the zero polynomial.
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &BigRational)> {
        self.terms.iter()
    }

    /// Number of nonzero terms.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// The coefficient of the constant monomial.
    pub fn constant_term(&self) -> BigRational {
        self.terms
            .get(&Monomial::unit(self.arity))
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    /// Total degree, or `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(Monomial::total_degree).max()
    }

    /// Leading term in graded-lexicographic order.
    pub fn leading(&self) -> Option<(&Monomial, &BigRational)> {
        self.terms.iter().next_back()
    }

    /// Adds `coeff * mono`, dropping the term if the total cancels.
    pub fn insert_term(&mut self, mono: Monomial, coeff: BigRational) {
        debug_assert_eq!(mono.0.len(), self.arity);
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(mono) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Multiplies by a scalar.
    pub fn scale(&self, factor: &BigRational) -> Self {
        if factor.is_zero() {
            return Self::zero(self.arity);
        }
        PolyNormalForm {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), c * factor))
                .collect(),
        }
    }

    /// Multiplies by `coeff * mono`.
    pub fn mul_monomial(&self, mono: &Monomial, coeff: &BigRational) -> Self {
        if coeff.is_zero() {
            return Self::zero(self.arity);
        }
        PolyNormalForm {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.mul(mono), c * coeff))
                .collect(),
        }
    }

    /// Natural-number power.
    pub fn pow(&self, exponent: u32) -> Self {
        let mut acc = Self::constant(self.arity, BigRational::one());
        for _ in 0..exponent {
            acc = &acc * self;
        }
        acc
    }

    /// Evaluates over any scalar; exact when the scalar is exact.
    pub fn eval<S: Scalar>(&self, point: &[S]) -> Result<S, EvalError> {
        if point.len() != self.arity {
            return Err(EvalError::ArityMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        let mut acc = S::zero();
        for (mono, coeff) in &self.terms {
            let mut term = S::from_rational(coeff);
            for (i, &e) in mono.0.iter().enumerate() {
                if e > 0 {
                    term = term * pow_scalar(point[i].clone(), e);
                }
            }
            acc = acc + term;
        }
        Ok(acc)
    }

    /// Substitutes `x_i -> x_i + center_i`, exactly.
    pub fn shift(&self, center: &[BigRational]) -> Self {
        assert_eq!(center.len(), self.arity, "center dimension mismatch");
        let mut acc = Self::zero(self.arity);
        for (mono, coeff) in &self.terms {
            let mut term = Self::constant(self.arity, coeff.clone());
            for (i, &e) in mono.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if center[i].is_zero() {
                    let mut exps = vec![0u32; self.arity];
                    exps[i] = e;
                    term = term.mul_monomial(&Monomial(exps), &BigRational::one());
                    continue;
                }
                // (x_i + c)^e by the binomial theorem
                let mut factor = Self::zero(self.arity);
                let mut binom = BigInt::one();
                let mut cpow = pow_scalar(center[i].clone(), e);
                let c_inv = BigRational::one() / center[i].clone();
                for j in 0..=e {
                    let mut exps = vec![0u32; self.arity];
                    exps[i] = j;
                    factor.insert_term(
                        Monomial(exps),
                        BigRational::from(binom.clone()) * cpow.clone(),
                    );
                    if j < e {
                        binom = binom * BigInt::from(e - j) / BigInt::from(j + 1);
                        cpow *= &c_inv;
                    }
                }
                term = &term * &factor;
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Discards all terms of total degree `>= bound`.
    pub fn truncated(&self, bound: u32) -> Self {
        PolyNormalForm {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| m.total_degree() < bound)
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Multivariate division zero test: true if repeated reduction by the
    /// leading terms of `dividers` cancels `self` completely.
    ///
    /// A `true` answer proves membership in the ideal generated by the
    /// dividers; `false` is inconclusive (the dividers need not be a Groebner
    /// basis).  `max_steps` caps the number of reduction steps.
    pub fn reduces_to_zero_mod(&self, dividers: &[PolyNormalForm], max_steps: usize) -> bool {
        let dividers: Vec<&PolyNormalForm> = dividers.iter().filter(|d| !d.is_zero()).collect();
        let mut p = self.clone();
        let mut steps = 0;
        'outer: while !p.is_zero() {
            steps += 1;
            if steps > max_steps {
                return false;
            }
            let (lm, lc) = {
                let (m, c) = p.leading().expect("nonzero polynomial has a leading term");
                (m.clone(), c.clone())
            };
            for d in &dividers {
                let (dm, dc) = d.leading().expect("nonzero divider");
                if dm.divides(&lm) {
                    let q = lm.quotient(dm);
                    let factor = lc.clone() / dc.clone();
                    p = &p - &d.mul_monomial(&q, &factor);
                    continue 'outer;
                }
            }
            // leading term reducible by no divider: nonzero remainder
            return false;
        }
        true
    }

    /// Hadamard quotients of a polynomial: `n` polynomials in `2n` variables
    /// with `f(y) - f(x) = sum_i (y_i - x_i) g_i(x, y)` as an exact identity.
    ///
    /// Uses the telescoping decomposition that rewrites one variable at a
    /// time, so each monomial of `f` contributes a geometric-sum block to
    /// each `g_i`.
    pub(crate) fn hadamard_parts(&self) -> Vec<PolyNormalForm> {
        let n = self.arity;
        let mut gs = vec![PolyNormalForm::zero(2 * n); n];
        for (mono, coeff) in &self.terms {
            let e = mono.exponents();
            for i in 0..n {
                if e[i] == 0 {
                    continue;
                }
                for s in 0..e[i] {
                    let mut exps = vec![0u32; 2 * n];
                    for (j, ej) in e.iter().enumerate().take(i) {
                        exps[j] = *ej;
                    }
                    exps[i] = s;
                    exps[n + i] = e[i] - 1 - s;
                    for (j, ej) in e.iter().enumerate().skip(i + 1) {
                        exps[n + j] = *ej;
                    }
                    gs[i].insert_term(Monomial(exps), coeff.clone());
                }
            }
        }
        gs
    }

    /// Converts back to an expression tree, terms in descending
    /// graded-lexicographic order.
    pub fn to_expr(&self) -> SmoothExpr {
        if self.is_zero() {
            return SmoothExpr::zero(self.arity);
        }
        let mut terms = Vec::with_capacity(self.terms.len());
        for (mono, coeff) in self.terms.iter().rev() {
            let mut factors = Vec::new();
            for (i, &e) in mono.0.iter().enumerate() {
                if e > 0 {
                    factors.push(npow(nvar(i + 1), e));
                }
            }
            let node = if coeff.is_one() && !factors.is_empty() {
                nprod(factors)
            } else if (-coeff).is_one() && !factors.is_empty() {
                nneg(nprod(factors))
            } else {
                let mut all = Vec::with_capacity(factors.len() + 1);
                all.push(nconst(coeff.clone()));
                all.extend(factors);
                nprod(all)
            };
            terms.push(node);
        }
        SmoothExpr {
            arity: self.arity,
            root: nsum(terms),
        }
    }
}

impl std::ops::Add for &PolyNormalForm {
    type Output = PolyNormalForm;
    fn add(self, rhs: &PolyNormalForm) -> PolyNormalForm {
        assert_eq!(self.arity, rhs.arity, "arity mismatch in polynomial sum");
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(m.clone(), c.clone());
        }
        out
    }
}

impl std::ops::Sub for &PolyNormalForm {
    type Output = PolyNormalForm;
    fn sub(self, rhs: &PolyNormalForm) -> PolyNormalForm {
        assert_eq!(
            self.arity, rhs.arity,
            "arity mismatch in polynomial difference"
        );
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.insert_term(m.clone(), -c.clone());
        }
        out
    }
}

impl std::ops::Neg for &PolyNormalForm {
    type Output = PolyNormalForm;
    fn neg(self) -> PolyNormalForm {
        PolyNormalForm {
            arity: self.arity,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl std::ops::Mul for &PolyNormalForm {
    type Output = PolyNormalForm;
    fn mul(self, rhs: &PolyNormalForm) -> PolyNormalForm {
        assert_eq!(self.arity, rhs.arity, "arity mismatch in polynomial product");
        let mut out = PolyNormalForm::zero(self.arity);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.insert_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn int(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn graded_lex_order() {
        // degree dominates, then lex with x1 largest
        let m = |e: &[u32]| Monomial::new(e.to_vec());
        assert!(m(&[0, 0]) < m(&[0, 1]));
        assert!(m(&[0, 1]) < m(&[1, 0]));
        assert!(m(&[1, 0]) < m(&[0, 2]));
        assert!(m(&[0, 2]) < m(&[1, 1]));
        assert!(m(&[1, 1]) < m(&[2, 0]));
    }

    #[test]
    fn monomial_enumeration() {
        let ms = monomials_below(2, 3);
        let expected: Vec<Monomial> = [
            vec![0, 0],
            vec![0, 1],
            vec![1, 0],
            vec![0, 2],
            vec![1, 1],
            vec![2, 0],
        ]
        .into_iter()
        .map(Monomial::new)
        .collect();
        assert_eq!(ms, expected);
        assert_eq!(monomials_below(0, 5), vec![Monomial::new(vec![])]);
        assert_eq!(monomials_below(3, 1), vec![Monomial::unit(3)]);
    }

    #[test]
    fn cancellation_removes_terms() {
        let x = PolyNormalForm::var(1, 1);
        let diff = &x - &x;
        assert!(diff.is_zero());
        assert_eq!(diff.term_count(), 0);
    }

    #[test]
    fn product_and_power() {
        // (x1 + x2)^2 = x1^2 + 2 x1 x2 + x2^2
        let s = &PolyNormalForm::var(2, 1) + &PolyNormalForm::var(2, 2);
        let sq = s.pow(2);
        assert_eq!(sq.term_count(), 3);
        assert_eq!(
            sq.terms.get(&Monomial::new(vec![1, 1])).cloned(),
            Some(int(2))
        );
        assert_eq!(sq.total_degree(), Some(2));
        assert_eq!(sq.leading().unwrap().0, &Monomial::new(vec![2, 0]));
    }

    #[test]
    fn shift_recentres_exactly() {
        // p(x) = x^2 - 1 at x -> x + 1 gives x^2 + 2x
        let p = &PolyNormalForm::var(1, 1).pow(2) - &PolyNormalForm::constant(1, int(1));
        let q = p.shift(&[int(1)]);
        let expected = &PolyNormalForm::var(1, 1).pow(2)
            + &PolyNormalForm::var(1, 1).scale(&int(2));
        assert_eq!(q, expected);
        assert!(q.constant_term().is_zero());
        // rational centers stay exact
        let r = p.shift(&[rat(1, 3)]);
        assert_eq!(r.constant_term(), rat(-8, 9));
    }

    #[test]
    fn eval_exact_and_float() {
        let p = &(&PolyNormalForm::var(2, 1) * &PolyNormalForm::var(2, 2))
            + &PolyNormalForm::constant(2, rat(1, 2));
        let exact: BigRational = p.eval(&[rat(2, 1), rat(3, 4)]).unwrap();
        assert_eq!(exact, int(2));
        let approx: f64 = p.eval(&[2.0, 0.75]).unwrap();
        assert_eq!(approx, 2.0);
    }

    #[test]
    fn division_zero_test() {
        // (x^2 - 1)*(x + 3) reduces to zero mod x^2 - 1
        let rel = &PolyNormalForm::var(1, 1).pow(2) - &PolyNormalForm::constant(1, int(1));
        let p = &rel * &(&PolyNormalForm::var(1, 1) + &PolyNormalForm::constant(1, int(3)));
        assert!(p.reduces_to_zero_mod(std::slice::from_ref(&rel), 1000));
        // x + 1 does not reduce to zero
        let q = &PolyNormalForm::var(1, 1) + &PolyNormalForm::constant(1, int(1));
        assert!(!q.reduces_to_zero_mod(std::slice::from_ref(&rel), 1000));
    }

    #[test]
    fn division_with_multiple_dividers() {
        // x1*x2 is in (x1 - x2, x2^2) since x1*x2 = x2*(x1 - x2) + x2^2
        let d1 = &PolyNormalForm::var(2, 1) - &PolyNormalForm::var(2, 2);
        let d2 = PolyNormalForm::var(2, 2).pow(2);
        let p = &PolyNormalForm::var(2, 1) * &PolyNormalForm::var(2, 2);
        assert!(p.reduces_to_zero_mod(&[d1, d2], 1000));
    }

    #[test]
    fn to_expr_round_trips_through_normal_form() {
        let p = &(&PolyNormalForm::var(2, 1).pow(3).scale(&rat(-3, 2))
            + &(&PolyNormalForm::var(2, 1) * &PolyNormalForm::var(2, 2)))
            + &PolyNormalForm::constant(2, int(7));
        let e = p.to_expr();
        assert_eq!(e.poly_normal_form().unwrap(), p);
    }

    #[test]
    fn truncation_drops_high_degrees() {
        let p = &PolyNormalForm::var(1, 1).pow(3) + &PolyNormalForm::var(1, 1);
        let t = p.truncated(3);
        assert_eq!(t, PolyNormalForm::var(1, 1));
    }
}
