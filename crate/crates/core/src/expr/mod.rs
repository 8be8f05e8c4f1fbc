//! Smooth scalar expressions in finitely many variables.
//!
//! A [`SmoothExpr`] of arity `n` denotes a smooth function `R^n -> R` built
//! from variables `x1..xn`, exact rational constants, sums, products,
//! negation, natural-number powers, and the primitives `exp`, `sin`, `cos`,
//! `atan`, `tanh`.  The grammar accepted by [`SmoothExpr::parse`] covers
//! exactly these; division, roots, and logarithms are rejected up front so
//! every representable expression is globally defined and smooth.
//!
//! Construction flattens nested sums and products and folds constants, and
//! does nothing else: `sin` is never rewritten, `x1 - x1` survives as a sum.
//! Symbolic questions (derivatives, composition, polynomial normal forms)
//! are answered structurally; numeric questions go through [`Scalar`]
//! evaluation.
//!
//! One internal node kind has no surface syntax: a weighted line integral
//! `int_0^1 w(t) g((1-t)x + t y) dt` used to express Hadamard quotients of
//! non-polynomial expressions.  It prints in a readable diagnostic form and
//! supports evaluation (by 32-node Gauss-Legendre quadrature on `[0,1]`),
//! differentiation, and composition like any other node, so downstream code
//! never needs to special-case it.

mod parse;
mod poly;
mod print;
mod quad;

pub use parse::ParseError;
pub use poly::{monomials_below, Monomial, PolyNormalForm};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::Rng;
use std::sync::Arc;

use crate::scalar::Scalar;

/// The smooth primitives the kernel understands.
///
/// All five are globally defined and smooth on the whole real line, with
/// derivatives expressible in terms of the same set (`atan' = cos(atan)^2`,
/// `tanh' = 1 - tanh^2`), so the expression language is closed under
/// differentiation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Primitive {
    Exp,
    Sin,
    Cos,
    Atan,
    Tanh,
}

impl Primitive {
    /// Name used by the parser and printer.
    pub fn name(self) -> &'static str {
        match self {
            Primitive::Exp => "exp",
            Primitive::Sin => "sin",
            Primitive::Cos => "cos",
            Primitive::Atan => "atan",
            Primitive::Tanh => "tanh",
        }
    }
}

impl std::fmt::Display for Primitive {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Errors from structural expression operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExprError {
    #[error("expected arity {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("variable index {index} out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
}

/// Errors from evaluating an expression over a [`Scalar`].
///
/// Floating-point evaluation is total; the exactness errors arise only for
/// scalar types (big rationals) that refuse approximate operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("expression of arity {expected} evaluated at a point of dimension {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("scalar type has no exact value for `{prim}`")]
    InexactPrimitive { prim: Primitive },
    #[error("scalar type cannot represent quadrature nodes")]
    InexactQuadrature,
}

/// Outcome of randomized numeric equality testing.
///
/// `Consistent` is evidence, not proof; `Falsified` carries a concrete point
/// where the two expressions visibly differ.
#[derive(Debug, Clone, PartialEq)]
pub enum EqualityVerdict {
    Consistent,
    Falsified { witness: Vec<f64> },
}

/// Internal node of an expression tree.
///
/// Nodes are arity-agnostic; only [`SmoothExpr`] carries the ambient arity.
/// Subtrees are shared through `Arc`, so cloning expressions is cheap.
#[derive(Debug, PartialEq)]
enum Node {
    /// 1-based variable reference.
    Var(usize),
    Const(BigRational),
    Sum(Vec<Arc<Node>>),
    Product(Vec<Arc<Node>>),
    Neg(Arc<Node>),
    Pow(Arc<Node>, u32),
    Prim(Primitive, Arc<Node>),
    PathIntegral(PathIntegralNode),
}

/// `int_0^1 w(t) g((1-t)x + t y) dt` where `x` and `y` are the first and
/// second halves of `args`.
///
/// The weight `w` is a univariate rational polynomial (coefficients of
/// `t^0, t^1, ...`).  Differentiating in an argument multiplies the weight by
/// `1-t` or `t` and differentiates the (closed) integrand, so this node kind
/// is closed under the calculus operations.
#[derive(Debug, PartialEq)]
struct PathIntegralNode {
    weight: Vec<BigRational>,
    integrand: SmoothExpr,
    args: Vec<Arc<Node>>,
}

/// A smooth function `R^arity -> R` as an immutable expression tree.
#[derive(Debug, Clone, PartialEq)]
pub struct SmoothExpr {
    arity: usize,
    root: Arc<Node>,
}

// ---------------------------------------------------------------------------
// node-level smart constructors (flattening and constant folding only)
// ---------------------------------------------------------------------------

fn nconst(q: BigRational) -> Arc<Node> {
    Arc::new(Node::Const(q))
}

fn nconst_i(n: i64) -> Arc<Node> {
    nconst(BigRational::from_integer(BigInt::from(n)))
}

fn nvar(index: usize) -> Arc<Node> {
    Arc::new(Node::Var(index))
}

fn acc_sum(child: Arc<Node>, flat: &mut Vec<Arc<Node>>, constant: &mut BigRational) {
    match &*child {
        Node::Sum(cs) => {
            for c in cs {
                acc_sum(c.clone(), flat, constant);
            }
        }
        Node::Const(q) => *constant += q,
        _ => flat.push(child),
    }
}

fn nsum(children: Vec<Arc<Node>>) -> Arc<Node> {
    let mut flat = Vec::new();
    let mut constant = BigRational::zero();
    for c in children {
        acc_sum(c, &mut flat, &mut constant);
    }
    if !constant.is_zero() {
        flat.push(nconst(constant));
    }
    match flat.len() {
        0 => nconst_i(0),
        1 => flat.pop().expect("nonempty"),
        _ => Arc::new(Node::Sum(flat)),
    }
}

fn acc_prod(child: Arc<Node>, flat: &mut Vec<Arc<Node>>, coeff: &mut BigRational) {
    match &*child {
        Node::Product(cs) => {
            for c in cs {
                acc_prod(c.clone(), flat, coeff);
            }
        }
        Node::Const(q) => *coeff *= q,
        _ => flat.push(child),
    }
}

fn nprod(children: Vec<Arc<Node>>) -> Arc<Node> {
    let mut flat = Vec::new();
    let mut coeff = BigRational::one();
    for c in children {
        acc_prod(c, &mut flat, &mut coeff);
    }
    if coeff.is_zero() {
        return nconst_i(0);
    }
    let mut out = Vec::with_capacity(flat.len() + 1);
    if !coeff.is_one() {
        out.push(nconst(coeff));
    }
    out.extend(flat);
    match out.len() {
        0 => nconst_i(1),
        1 => out.pop().expect("nonempty"),
        _ => Arc::new(Node::Product(out)),
    }
}

fn nneg(child: Arc<Node>) -> Arc<Node> {
    match &*child {
        Node::Const(q) => nconst(-q.clone()),
        _ => Arc::new(Node::Neg(child)),
    }
}

fn npow(base: Arc<Node>, exponent: u32) -> Arc<Node> {
    match exponent {
        0 => nconst_i(1),
        1 => base,
        _ => match &*base {
            Node::Const(q) => nconst(num_traits::pow(q.clone(), exponent as usize)),
            _ => Arc::new(Node::Pow(base, exponent)),
        },
    }
}

fn nprim(prim: Primitive, arg: Arc<Node>) -> Arc<Node> {
    Arc::new(Node::Prim(prim, arg))
}

/// Exponentiation by squaring over an arbitrary scalar.
pub(crate) fn pow_scalar<S: Scalar>(base: S, mut exponent: u32) -> S {
    let mut acc = S::one();
    let mut base = base;
    while exponent > 0 {
        if exponent & 1 == 1 {
            acc = acc * base.clone();
        }
        exponent >>= 1;
        if exponent > 0 {
            base = base.clone() * base;
        }
    }
    acc
}

// ---------------------------------------------------------------------------
// public construction API
// ---------------------------------------------------------------------------

impl SmoothExpr {
    /// Number of variables this expression depends on (at most).
    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The variable `x{index}` (1-based) as an expression of the given arity.
    pub fn var(arity: usize, index: usize) -> Result<Self, ExprError> {
        if index == 0 || index > arity {
            return Err(ExprError::IndexOutOfRange { index, arity });
        }
        Ok(SmoothExpr {
            arity,
            root: nvar(index),
        })
    }

    /// An exact rational constant of the given arity.
    pub fn constant(arity: usize, value: BigRational) -> Self {
        SmoothExpr {
            arity,
            root: nconst(value),
        }
    }

    /// An integer constant of the given arity.
    pub fn from_int(arity: usize, value: i64) -> Self {
        SmoothExpr {
            arity,
            root: nconst_i(value),
        }
    }

    /// The zero expression of the given arity.
    pub fn zero(arity: usize) -> Self {
        Self::from_int(arity, 0)
    }

    /// The unit expression of the given arity.
    pub fn one(arity: usize) -> Self {
        Self::from_int(arity, 1)
    }

    /// Sum of the given terms, all of which must have the stated arity.
    pub fn sum(arity: usize, terms: &[SmoothExpr]) -> Result<Self, ExprError> {
        let mut children = Vec::with_capacity(terms.len());
        for t in terms {
            if t.arity != arity {
                return Err(ExprError::ArityMismatch {
                    expected: arity,
                    got: t.arity,
                });
            }
            children.push(t.root.clone());
        }
        Ok(SmoothExpr {
            arity,
            root: nsum(children),
        })
    }

    /// Product of the given factors, all of which must have the stated arity.
    pub fn product(arity: usize, factors: &[SmoothExpr]) -> Result<Self, ExprError> {
        let mut children = Vec::with_capacity(factors.len());
        for t in factors {
            if t.arity != arity {
                return Err(ExprError::ArityMismatch {
                    expected: arity,
                    got: t.arity,
                });
            }
            children.push(t.root.clone());
        }
        Ok(SmoothExpr {
            arity,
            root: nprod(children),
        })
    }

    /// `self` raised to a natural-number power.
    pub fn pow(&self, exponent: u32) -> Self {
        SmoothExpr {
            arity: self.arity,
            root: npow(self.root.clone(), exponent),
        }
    }

    /// Applies a smooth primitive to `arg`.
    pub fn primitive(prim: Primitive, arg: &SmoothExpr) -> Self {
        SmoothExpr {
            arity: arg.arity,
            root: nprim(prim, arg.root.clone()),
        }
    }

    /// Parses `text` against the expression grammar at the given arity.
    ///
    /// The result round-trips through [`Display`](std::fmt::Display): printing
    /// and re-parsing yields a structurally identical tree.
    pub fn parse(text: &str, arity: usize) -> Result<Self, ParseError> {
        parse::parse(text, arity)
    }

    /// True if this expression is the literal constant zero.
    pub fn is_zero_literal(&self) -> bool {
        matches!(&*self.root, Node::Const(q) if q.is_zero())
    }

    /// The constant value, if this expression is a literal constant.
    pub fn as_constant(&self) -> Option<&BigRational> {
        match &*self.root {
            Node::Const(q) => Some(q),
            _ => None,
        }
    }
}

impl std::ops::Add for &SmoothExpr {
    type Output = SmoothExpr;
    fn add(self, rhs: &SmoothExpr) -> SmoothExpr {
        assert_eq!(self.arity, rhs.arity, "arity mismatch in expression sum");
        SmoothExpr {
            arity: self.arity,
            root: nsum(vec![self.root.clone(), rhs.root.clone()]),
        }
    }
}

impl std::ops::Sub for &SmoothExpr {
    type Output = SmoothExpr;
    fn sub(self, rhs: &SmoothExpr) -> SmoothExpr {
        assert_eq!(
            self.arity, rhs.arity,
            "arity mismatch in expression difference"
        );
        SmoothExpr {
            arity: self.arity,
            root: nsum(vec![self.root.clone(), nneg(rhs.root.clone())]),
        }
    }
}

impl std::ops::Mul for &SmoothExpr {
    type Output = SmoothExpr;
    fn mul(self, rhs: &SmoothExpr) -> SmoothExpr {
        assert_eq!(
            self.arity, rhs.arity,
            "arity mismatch in expression product"
        );
        SmoothExpr {
            arity: self.arity,
            root: nprod(vec![self.root.clone(), rhs.root.clone()]),
        }
    }
}

impl std::ops::Neg for &SmoothExpr {
    type Output = SmoothExpr;
    fn neg(self) -> SmoothExpr {
        SmoothExpr {
            arity: self.arity,
            root: nneg(self.root.clone()),
        }
    }
}

// ---------------------------------------------------------------------------
// calculus
// ---------------------------------------------------------------------------

impl SmoothExpr {
    /// Evaluates at a point with coordinates in any [`Scalar`].
    ///
    /// Total for floating-point scalars.  Exact scalars fail on primitives
    /// and on quadrature-backed nodes rather than round silently.
    pub fn evaluate<S: Scalar>(&self, point: &[S]) -> Result<S, EvalError> {
        if point.len() != self.arity {
            return Err(EvalError::ArityMismatch {
                expected: self.arity,
                got: point.len(),
            });
        }
        eval_node(&self.root, point)
    }

    /// The partial derivative with respect to `x{index}` (1-based).
    pub fn partial(&self, index: usize) -> Result<SmoothExpr, ExprError> {
        if index == 0 || index > self.arity {
            return Err(ExprError::IndexOutOfRange {
                index,
                arity: self.arity,
            });
        }
        Ok(SmoothExpr {
            arity: self.arity,
            root: dnode(&self.root, index),
        })
    }

    /// Substitutes `args` for the variables of `self`.
    ///
    /// All substituted expressions must share `target_arity`; the parameter
    /// also fixes the result arity when `self` has arity 0 and `args` is
    /// empty.
    pub fn compose(&self, args: &[SmoothExpr], target_arity: usize) -> Result<Self, ExprError> {
        if args.len() != self.arity {
            return Err(ExprError::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        for a in args {
            if a.arity != target_arity {
                return Err(ExprError::ArityMismatch {
                    expected: target_arity,
                    got: a.arity,
                });
            }
        }
        Ok(SmoothExpr {
            arity: target_arity,
            root: subst(&self.root, args),
        })
    }

    /// The polynomial normal form, or `None` if a primitive or integral node
    /// occurs.  Not being a polynomial is a regular outcome, not an error.
    pub fn poly_normal_form(&self) -> Option<PolyNormalForm> {
        poly_node(&self.root, self.arity)
    }

    /// Hadamard quotients: expressions `g1..gn` of arity `2n` with
    /// `f(y) - f(x) = sum_i (y_i - x_i) g_i(x, y)`.
    ///
    /// For polynomial `f` the quotients are exact polynomial divided
    /// differences and the identity holds as an identity of rational
    /// polynomials.  Otherwise each `g_i` is the line integral
    /// `int_0^1 (d_i f)((1-t)x + t y) dt`, evaluated by quadrature, and the
    /// identity holds numerically to high accuracy.
    pub fn hadamard_decompose(&self) -> Vec<SmoothExpr> {
        let n = self.arity;
        if let Some(p) = self.poly_normal_form() {
            return p.hadamard_parts().into_iter().map(|g| g.to_expr()).collect();
        }
        (1..=n)
            .map(|i| {
                let di = SmoothExpr {
                    arity: n,
                    root: dnode(&self.root, i),
                };
                let args: Vec<Arc<Node>> = (1..=2 * n).map(nvar).collect();
                SmoothExpr {
                    arity: 2 * n,
                    root: Arc::new(Node::PathIntegral(PathIntegralNode {
                        weight: vec![BigRational::one()],
                        integrand: di,
                        args,
                    })),
                }
            })
            .collect()
    }

    /// Samples both expressions at uniform random points of the box and
    /// reports the first point (if any) where they visibly differ.
    ///
    /// The comparison is relative: a point falsifies when
    /// `|self - other| > tol * (1 + |self|)`.
    pub fn equal_numeric<R: Rng + ?Sized>(
        &self,
        other: &SmoothExpr,
        bounds: &[(f64, f64)],
        samples: usize,
        tol: f64,
        rng: &mut R,
    ) -> Result<EqualityVerdict, ExprError> {
        if other.arity != self.arity {
            return Err(ExprError::ArityMismatch {
                expected: self.arity,
                got: other.arity,
            });
        }
        if bounds.len() != self.arity {
            return Err(ExprError::ArityMismatch {
                expected: self.arity,
                got: bounds.len(),
            });
        }
        for _ in 0..samples {
            let x: Vec<f64> = bounds
                .iter()
                .map(|&(lo, hi)| if lo == hi { lo } else { rng.gen_range(lo..=hi) })
                .collect();
            let a: f64 = self.evaluate(&x).expect("f64 evaluation is total");
            let b: f64 = other.evaluate(&x).expect("f64 evaluation is total");
            if (a - b).abs() > tol * (1.0 + a.abs()) {
                return Ok(EqualityVerdict::Falsified { witness: x });
            }
        }
        Ok(EqualityVerdict::Consistent)
    }
}

fn eval_node<S: Scalar>(node: &Node, point: &[S]) -> Result<S, EvalError> {
    match node {
        Node::Var(i) => Ok(point[i - 1].clone()),
        Node::Const(q) => Ok(S::from_rational(q)),
        Node::Sum(cs) => {
            let mut acc = S::zero();
            for c in cs {
                acc = acc + eval_node(c, point)?;
            }
            Ok(acc)
        }
        Node::Product(cs) => {
            let mut acc = S::one();
            for c in cs {
                acc = acc * eval_node(c, point)?;
            }
            Ok(acc)
        }
        Node::Neg(c) => Ok(-eval_node(c, point)?),
        Node::Pow(b, k) => Ok(pow_scalar(eval_node(b, point)?, *k)),
        Node::Prim(p, a) => {
            let x = eval_node(a, point)?;
            S::apply_primitive(*p, x).ok_or(EvalError::InexactPrimitive { prim: *p })
        }
        Node::PathIntegral(pi) => eval_path_integral(pi, point),
    }
}

fn eval_path_integral<S: Scalar>(pi: &PathIntegralNode, point: &[S]) -> Result<S, EvalError> {
    let n = pi.integrand.arity;
    debug_assert_eq!(pi.args.len(), 2 * n);
    let xs: Vec<S> = pi.args[..n]
        .iter()
        .map(|a| eval_node(a, point))
        .collect::<Result<_, _>>()?;
    let ys: Vec<S> = pi.args[n..]
        .iter()
        .map(|a| eval_node(a, point))
        .collect::<Result<_, _>>()?;
    let mut acc = S::zero();
    for &(t, w) in quad::gauss_legendre_01() {
        let ts = S::from_f64_approx(t).ok_or(EvalError::InexactQuadrature)?;
        let ws = S::from_f64_approx(w).ok_or(EvalError::InexactQuadrature)?;
        let one_minus = S::one() - ts.clone();
        let z: Vec<S> = (0..n)
            .map(|j| one_minus.clone() * xs[j].clone() + ts.clone() * ys[j].clone())
            .collect();
        // Horner evaluation of the weight polynomial at t.
        let mut wt = S::zero();
        for c in pi.weight.iter().rev() {
            wt = wt * ts.clone() + S::from_rational(c);
        }
        let g = eval_node(&pi.integrand.root, &z)?;
        acc = acc + ws * wt * g;
    }
    Ok(acc)
}

/// Weight-polynomial product with `t`.
fn weight_mul_t(w: &[BigRational]) -> Vec<BigRational> {
    let mut out = Vec::with_capacity(w.len() + 1);
    out.push(BigRational::zero());
    out.extend(w.iter().cloned());
    out
}

/// Weight-polynomial product with `1 - t`.
fn weight_mul_one_minus_t(w: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); w.len() + 1];
    for (k, c) in w.iter().enumerate() {
        out[k] += c;
        out[k + 1] -= c;
    }
    out
}

fn dnode(node: &Arc<Node>, index: usize) -> Arc<Node> {
    match &**node {
        Node::Var(j) => nconst_i(if *j == index { 1 } else { 0 }),
        Node::Const(_) => nconst_i(0),
        Node::Sum(cs) => nsum(cs.iter().map(|c| dnode(c, index)).collect()),
        Node::Product(cs) => {
            let mut terms = Vec::with_capacity(cs.len());
            for k in 0..cs.len() {
                let mut factors = Vec::with_capacity(cs.len());
                for (j, c) in cs.iter().enumerate() {
                    if j == k {
                        factors.push(dnode(c, index));
                    } else {
                        factors.push(c.clone());
                    }
                }
                terms.push(nprod(factors));
            }
            nsum(terms)
        }
        Node::Neg(c) => nneg(dnode(c, index)),
        Node::Pow(b, k) => nprod(vec![
            nconst_i(*k as i64),
            npow(b.clone(), k - 1),
            dnode(b, index),
        ]),
        Node::Prim(p, a) => {
            let outer = match p {
                Primitive::Exp => nprim(Primitive::Exp, a.clone()),
                Primitive::Sin => nprim(Primitive::Cos, a.clone()),
                Primitive::Cos => nneg(nprim(Primitive::Sin, a.clone())),
                // atan' = 1/(1+x^2) = cos(atan x)^2, keeping the derivative
                // inside the primitive-closed language.
                Primitive::Atan => npow(nprim(Primitive::Cos, nprim(Primitive::Atan, a.clone())), 2),
                Primitive::Tanh => nsum(vec![
                    nconst_i(1),
                    nneg(npow(nprim(Primitive::Tanh, a.clone()), 2)),
                ]),
            };
            nprod(vec![outer, dnode(a, index)])
        }
        Node::PathIntegral(pi) => {
            let n = pi.integrand.arity;
            let mut terms = Vec::new();
            for (k, arg) in pi.args.iter().enumerate() {
                let darg = dnode(arg, index);
                if matches!(&*darg, Node::Const(q) if q.is_zero()) {
                    continue;
                }
                let weight = if k < n {
                    weight_mul_one_minus_t(&pi.weight)
                } else {
                    weight_mul_t(&pi.weight)
                };
                let integrand = SmoothExpr {
                    arity: n,
                    root: dnode(&pi.integrand.root, (k % n) + 1),
                };
                let dpk = Arc::new(Node::PathIntegral(PathIntegralNode {
                    weight,
                    integrand,
                    args: pi.args.clone(),
                }));
                terms.push(nprod(vec![dpk, darg]));
            }
            nsum(terms)
        }
    }
}

fn subst(node: &Arc<Node>, args: &[SmoothExpr]) -> Arc<Node> {
    match &**node {
        Node::Var(j) => args[j - 1].root.clone(),
        Node::Const(_) => node.clone(),
        Node::Sum(cs) => nsum(cs.iter().map(|c| subst(c, args)).collect()),
        Node::Product(cs) => nprod(cs.iter().map(|c| subst(c, args)).collect()),
        Node::Neg(c) => nneg(subst(c, args)),
        Node::Pow(b, k) => npow(subst(b, args), *k),
        Node::Prim(p, a) => nprim(*p, subst(a, args)),
        Node::PathIntegral(pi) => Arc::new(Node::PathIntegral(PathIntegralNode {
            weight: pi.weight.clone(),
            integrand: pi.integrand.clone(),
            args: pi.args.iter().map(|c| subst(c, args)).collect(),
        })),
    }
}

fn poly_node(node: &Node, arity: usize) -> Option<PolyNormalForm> {
    match node {
        Node::Var(i) => Some(PolyNormalForm::var(arity, *i)),
        Node::Const(q) => Some(PolyNormalForm::constant(arity, q.clone())),
        Node::Sum(cs) => {
            let mut acc = PolyNormalForm::zero(arity);
            for c in cs {
                acc = &acc + &poly_node(c, arity)?;
            }
            Some(acc)
        }
        Node::Product(cs) => {
            let mut acc = PolyNormalForm::constant(arity, BigRational::one());
            for c in cs {
                acc = &acc * &poly_node(c, arity)?;
            }
            Some(acc)
        }
        Node::Neg(c) => Some(-&poly_node(c, arity)?),
        Node::Pow(b, k) => Some(poly_node(b, arity)?.pow(*k)),
        Node::Prim(..) | Node::PathIntegral(..) => None,
    }
}
