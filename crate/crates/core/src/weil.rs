//! Weil algebras: finite-dimensional local real algebras with nilpotent
//! maximal ideal, and the jet arithmetic they carry.
//!
//! A [`WeilAlgebra`] is presented by a generator count `m`, a truncation
//! order, and optional extra polynomial relations lying in the maximal ideal
//! `(y1..ym)`: the algebra is the span of monomials of total degree below the
//! order, modulo the span of all truncated multiples of the relations.  The
//! construction runs exact Gauss-Jordan elimination over big rationals, so
//! the basis and the structure constants are exact data, not floats.
//!
//! Every smooth expression acts on such an algebra through its truncated
//! Taylor expansion: [`apply`] sends arguments `a_i = r_i + nu_i` (scalar
//! residue plus nilpotent part) to `sum_alpha (d^alpha f)(r) / alpha! *
//! nu^alpha`, a finite sum because the `nu_i` are nilpotent.  Over `f64` this
//! is forward-mode jet (Taylor) arithmetic; over exact rationals it is exact
//! whenever the expression is polynomial.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::expr::{monomials_below, EvalError, Monomial, PolyNormalForm, SmoothExpr};
use crate::scalar::Scalar;

/// Errors from Weil-algebra construction and arithmetic.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WeilError {
    #[error("expected arity {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("relation {index} has a nonzero constant term, so it lies outside the maximal ideal")]
    RelationNotInMaximalIdeal { index: usize },
    #[error("the presentation collapses to the zero algebra")]
    ZeroAlgebra,
    #[error("elements belong to different Weil algebras")]
    AlgebraMismatch,
    #[error("coordinate vector has length {got}, expected dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// A Weil algebra with an exact monomial basis and exact reduction data.
///
/// `basis[0]` is always the unit monomial; the remaining basis monomials
/// span the maximal ideal.  `reduce` maps every monomial of degree below
/// `order` to its coordinate vector over the basis (monomials of degree
/// `>= order` reduce to zero implicitly).
#[derive(Debug, PartialEq, Eq)]
pub struct WeilAlgebra {
    num_gens: usize,
    order: u32,
    relations: Vec<PolyNormalForm>,
    basis: Vec<Monomial>,
    basis_pos: BTreeMap<Monomial, usize>,
    reduce: BTreeMap<Monomial, Vec<BigRational>>,
}

/// Basis display order: ascending total degree, then lexicographically with
/// `y1` listed first (so two generators enumerate as `1, a, b, a^2, ab, b^2`).
fn basis_cmp(a: &Monomial, b: &Monomial) -> std::cmp::Ordering {
    a.total_degree()
        .cmp(&b.total_degree())
        .then_with(|| b.exponents().cmp(a.exponents()))
}

/// Full reduced row echelon form over the rationals, pivoting on the
/// graded-lexicographically largest monomial (highest column index) first.
/// Returns the pivot columns with their fully reduced rows.
fn rref(mut rows: Vec<Vec<BigRational>>, ncols: usize) -> Vec<(usize, Vec<BigRational>)> {
    let mut used = vec![false; rows.len()];
    let mut pivots = Vec::new();
    for col in (0..ncols).rev() {
        let Some(r) = (0..rows.len()).find(|&r| !used[r] && !rows[r][col].is_zero()) else {
            continue;
        };
        used[r] = true;
        let lead = rows[r][col].clone();
        for entry in rows[r].iter_mut() {
            *entry /= &lead;
        }
        for r2 in 0..rows.len() {
            if r2 == r || rows[r2][col].is_zero() {
                continue;
            }
            let factor = rows[r2][col].clone();
            for c in 0..ncols {
                let delta = &factor * &rows[r][c];
                rows[r2][c] -= delta;
            }
        }
        pivots.push((col, r));
    }
    pivots
        .into_iter()
        .map(|(col, r)| (col, rows[r].clone()))
        .collect()
}

impl WeilAlgebra {
    /// Builds the quotient of the span of monomials of degree `< order` in
    /// `num_gens` generators by the given relations.
    ///
    /// Relations must be polynomials in the generators with zero constant
    /// term.  `order == 0` (or relations forcing `1 = 0`) is rejected as the
    /// zero algebra, which is not a Weil algebra.
    pub fn new(
        num_gens: usize,
        order: u32,
        relations: &[PolyNormalForm],
    ) -> Result<Arc<Self>, WeilError> {
        for (index, r) in relations.iter().enumerate() {
            if r.arity() != num_gens {
                return Err(WeilError::ArityMismatch {
                    expected: num_gens,
                    got: r.arity(),
                });
            }
            if !r.constant_term().is_zero() {
                return Err(WeilError::RelationNotInMaximalIdeal { index });
            }
        }
        let monos = monomials_below(num_gens, order);
        if monos.is_empty() {
            return Err(WeilError::ZeroAlgebra);
        }
        let index_of: BTreeMap<Monomial, usize> = monos
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();

        let one = BigRational::one();
        let mut rows = Vec::new();
        for r in relations {
            if r.is_zero() {
                continue;
            }
            for q in &monos {
                let prod = r.mul_monomial(q, &one).truncated(order);
                if prod.is_zero() {
                    continue;
                }
                let mut row = vec![BigRational::zero(); monos.len()];
                for (m, c) in prod.terms() {
                    row[index_of[m]] = c.clone();
                }
                rows.push(row);
            }
        }
        let pivot_rows = rref(rows, monos.len());
        let pivot_cols: BTreeMap<usize, &Vec<BigRational>> =
            pivot_rows.iter().map(|(c, row)| (*c, row)).collect();
        if pivot_cols.contains_key(&0) {
            // the unit monomial is index 0 in graded-lex order
            return Err(WeilError::ZeroAlgebra);
        }

        let mut basis: Vec<Monomial> = monos
            .iter()
            .enumerate()
            .filter(|(i, _)| !pivot_cols.contains_key(i))
            .map(|(_, m)| m.clone())
            .collect();
        basis.sort_by(basis_cmp);
        let basis_pos: BTreeMap<Monomial, usize> = basis
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();

        let mut reduce = BTreeMap::new();
        for (i, mono) in monos.iter().enumerate() {
            let mut coords = vec![BigRational::zero(); basis.len()];
            match pivot_cols.get(&i) {
                None => coords[basis_pos[mono]] = BigRational::one(),
                Some(row) => {
                    // pivot row says mono + sum_c row[c] * mono_c = 0 with
                    // nonzero entries only at non-pivot columns
                    for (c, entry) in row.iter().enumerate() {
                        if c != i && !entry.is_zero() {
                            coords[basis_pos[&monos[c]]] = -entry.clone();
                        }
                    }
                }
            }
            reduce.insert(mono.clone(), coords);
        }

        Ok(Arc::new(WeilAlgebra {
            num_gens,
            order,
            relations: relations.to_vec(),
            basis,
            basis_pos,
            reduce,
        }))
    }

    /// Number of algebra generators.
    pub fn num_gens(&self) -> usize {
        self.num_gens
    }

    /// Truncation order: all monomials of this total degree vanish.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Extra relations beyond the degree truncation.
    pub fn relations(&self) -> &[PolyNormalForm] {
        &self.relations
    }

    /// Basis monomials; the unit is first.
    pub fn basis(&self) -> &[Monomial] {
        &self.basis
    }

    /// Real vector-space dimension.
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a monomial's image, or `None` when it reduces to zero.
    fn reduction(&self, mono: &Monomial) -> Option<&Vec<BigRational>> {
        self.reduce.get(mono)
    }

    /// The zero element.
    pub fn zero<S: Scalar>(self: &Arc<Self>) -> WeilElement<S> {
        WeilElement {
            algebra: self.clone(),
            coords: vec![S::zero(); self.basis.len()],
        }
    }

    /// The multiplicative unit.
    pub fn unit<S: Scalar>(self: &Arc<Self>) -> WeilElement<S> {
        let mut e = self.zero();
        e.coords[0] = S::one();
        e
    }

    /// An element from its coordinate vector over the basis.
    pub fn element<S: Scalar>(self: &Arc<Self>, coords: Vec<S>) -> Result<WeilElement<S>, WeilError> {
        if coords.len() != self.basis.len() {
            return Err(WeilError::DimensionMismatch {
                expected: self.basis.len(),
                got: coords.len(),
            });
        }
        Ok(WeilElement {
            algebra: self.clone(),
            coords,
        })
    }

    /// The image of a polynomial in the generators.
    pub fn reduce_poly<S: Scalar>(
        self: &Arc<Self>,
        p: &PolyNormalForm,
    ) -> Result<WeilElement<S>, WeilError> {
        if p.arity() != self.num_gens {
            return Err(WeilError::ArityMismatch {
                expected: self.num_gens,
                got: p.arity(),
            });
        }
        let mut e = self.zero::<S>();
        for (mono, coeff) in p.terms() {
            let Some(red) = self.reduction(mono) else {
                continue;
            };
            let c = S::from_rational(coeff);
            for (k, r) in red.iter().enumerate() {
                if !r.is_zero() {
                    e.coords[k] = e.coords[k].clone() + c.clone() * S::from_rational(r);
                }
            }
        }
        Ok(e)
    }

    /// The image of the `index`-th generator (1-based).
    pub fn generator<S: Scalar>(self: &Arc<Self>, index: usize) -> Result<WeilElement<S>, WeilError> {
        if index == 0 || index > self.num_gens {
            return Err(WeilError::ArityMismatch {
                expected: self.num_gens,
                got: index,
            });
        }
        self.reduce_poly(&PolyNormalForm::var(self.num_gens, index))
    }

    /// Serialization used by reports: generator count, order, relations in
    /// printed form, and the basis as exponent lists.
    pub fn json_value(&self) -> Value {
        json!({
            "m": self.num_gens,
            "order": self.order,
            "relations": self.relations.iter().map(|r| r.to_expr().to_string()).collect::<Vec<_>>(),
            "basis": self.basis.iter().map(|b| b.exponents().to_vec()).collect::<Vec<_>>(),
        })
    }
}

/// An element of a Weil algebra: a coordinate vector over the algebra basis.
#[derive(Debug, Clone)]
pub struct WeilElement<S: Scalar> {
    algebra: Arc<WeilAlgebra>,
    coords: Vec<S>,
}

impl<S: Scalar> PartialEq for WeilElement<S> {
    fn eq(&self, other: &Self) -> bool {
        self.same_algebra(other) && self.coords == other.coords
    }
}

impl<S: Scalar> WeilElement<S> {
    /// The ambient algebra.
    pub fn algebra(&self) -> &Arc<WeilAlgebra> {
        &self.algebra
    }

    /// Coordinates over the algebra basis.
    pub fn coords(&self) -> &[S] {
        &self.coords
    }

    /// The residue: the coefficient of the unit basis element, i.e. the image
    /// in `W / m = R`.
    pub fn residue(&self) -> S {
        self.coords[0].clone()
    }

    /// The nilpotent part `self - residue * 1`.
    pub fn nilpotent_part(&self) -> WeilElement<S> {
        let mut e = self.clone();
        e.coords[0] = S::zero();
        e
    }

    /// True if all coordinates are zero.
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    /// Multiplies every coordinate by a scalar.
    pub fn scale(&self, factor: S) -> WeilElement<S> {
        WeilElement {
            algebra: self.algebra.clone(),
            coords: self
                .coords
                .iter()
                .map(|c| c.clone() * factor.clone())
                .collect(),
        }
    }

    fn same_algebra(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.algebra, &other.algebra) || self.algebra == other.algebra
    }

    /// Serialization used by reports.
    pub fn json_value(&self) -> Value
    where
        S: Into<Value> + Copy,
    {
        json!({ "coords": self.coords.iter().map(|&c| c.into()).collect::<Vec<Value>>() })
    }
}

impl<S: Scalar> std::ops::Add for &WeilElement<S> {
    type Output = WeilElement<S>;
    fn add(self, rhs: &WeilElement<S>) -> WeilElement<S> {
        assert!(self.same_algebra(rhs), "Weil algebra mismatch in sum");
        WeilElement {
            algebra: self.algebra.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> std::ops::Sub for &WeilElement<S> {
    type Output = WeilElement<S>;
    fn sub(self, rhs: &WeilElement<S>) -> WeilElement<S> {
        assert!(self.same_algebra(rhs), "Weil algebra mismatch in difference");
        WeilElement {
            algebra: self.algebra.clone(),
            coords: self
                .coords
                .iter()
                .zip(&rhs.coords)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }
}

impl<S: Scalar> std::ops::Neg for &WeilElement<S> {
    type Output = WeilElement<S>;
    fn neg(self) -> WeilElement<S> {
        WeilElement {
            algebra: self.algebra.clone(),
            coords: self.coords.iter().map(|a| -a.clone()).collect(),
        }
    }
}

impl<S: Scalar> std::ops::Mul for &WeilElement<S> {
    type Output = WeilElement<S>;
    fn mul(self, rhs: &WeilElement<S>) -> WeilElement<S> {
        assert!(self.same_algebra(rhs), "Weil algebra mismatch in product");
        let alg = &self.algebra;
        let mut out = alg.zero::<S>();
        for (i, a) in self.coords.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coords.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let mono = alg.basis[i].mul(&alg.basis[j]);
                let Some(red) = alg.reduction(&mono) else {
                    continue;
                };
                let ab = a.clone() * b.clone();
                for (k, r) in red.iter().enumerate() {
                    if !r.is_zero() {
                        out.coords[k] = out.coords[k].clone() + ab.clone() * S::from_rational(r);
                    }
                }
            }
        }
        out
    }
}

/// Applies a smooth expression to Weil-algebra arguments by truncated Taylor
/// expansion about the residues:
/// `f(a) = sum_{|alpha| < order} (d^alpha f)(r) / alpha! * nu^alpha`.
///
/// The `algebra` argument fixes the ambient algebra (needed when `f` has
/// arity zero); all arguments must belong to it.  Over an exact scalar the
/// result is exact, and the evaluation fails if `f` involves a primitive.
pub fn apply<S: Scalar>(
    algebra: &Arc<WeilAlgebra>,
    f: &SmoothExpr,
    args: &[WeilElement<S>],
) -> Result<WeilElement<S>, WeilError> {
    if args.len() != f.arity() {
        return Err(WeilError::ArityMismatch {
            expected: f.arity(),
            got: args.len(),
        });
    }
    for a in args {
        if !(Arc::ptr_eq(&a.algebra, algebra) || a.algebra.as_ref() == algebra.as_ref()) {
            return Err(WeilError::AlgebraMismatch);
        }
    }
    let residues: Vec<S> = args.iter().map(WeilElement::residue).collect();
    let nilpotents: Vec<WeilElement<S>> = args.iter().map(WeilElement::nilpotent_part).collect();
    let mut acc = algebra.zero::<S>();
    let mut counts = vec![0u32; args.len()];
    taylor_rec(
        f,
        &algebra.unit::<S>(),
        0,
        &mut counts,
        &BigInt::one(),
        algebra.order.saturating_sub(1),
        &residues,
        &nilpotents,
        &mut acc,
    )?;
    Ok(acc)
}

/// Depth-first walk over multi-indices in non-decreasing generator order.
/// `expr` is the current symbolic partial derivative, `nu_pow` the current
/// `nu^alpha`, `factorial` the current `alpha!`.
#[allow(clippy::too_many_arguments)]
fn taylor_rec<S: Scalar>(
    expr: &SmoothExpr,
    nu_pow: &WeilElement<S>,
    start: usize,
    counts: &mut [u32],
    factorial: &BigInt,
    remaining: u32,
    residues: &[S],
    nilpotents: &[WeilElement<S>],
    acc: &mut WeilElement<S>,
) -> Result<(), WeilError> {
    if expr.is_zero_literal() || nu_pow.is_zero() {
        return Ok(());
    }
    let value = expr.evaluate(residues)?;
    if !value.is_zero() {
        let inv_fact = S::from_rational(&BigRational::new(BigInt::one(), factorial.clone()));
        let term = nu_pow.scale(value * inv_fact);
        *acc = &*acc + &term;
    }
    if remaining == 0 {
        return Ok(());
    }
    for i in start..nilpotents.len() {
        let nu_next = nu_pow * &nilpotents[i];
        if nu_next.is_zero() {
            continue;
        }
        let d = expr.partial(i + 1).expect("derivative index in range");
        counts[i] += 1;
        let fact_next = factorial * BigInt::from(counts[i]);
        taylor_rec(
            &d,
            &nu_next,
            i,
            counts,
            &fact_next,
            remaining - 1,
            residues,
            nilpotents,
            acc,
        )?;
        counts[i] -= 1;
    }
    Ok(())
}
