//! Deterministic compact printing of expression trees.
//!
//! Printing follows the surface grammar with no whitespace, inserting
//! parentheses exactly where re-parsing would otherwise regroup the tree, so
//! `parse(print(e))` is structurally `e`.  Constants print as exact decimals
//! when the denominator is a product of twos and fives (the only
//! denominators the grammar and the kernel's own rewrites produce) and as
//! `p/q` otherwise; the latter form is for diagnostics only and is not
//! re-parseable.
//!
//! Line-integral nodes have no surface syntax and print in a readable
//! `pathint(weight; integrand; args)` diagnostic form, with the integrand in
//! its own variable scope.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::{self, Write};

use super::{Node, PathIntegralNode, SmoothExpr};

/// Syntactic position of a node, from loosest to tightest binding.
#[derive(Clone, Copy, PartialEq, Eq)]
enum Pos {
    Expr,
    Term,
    Factor,
    PowBase,
    NegOperand,
}

impl fmt::Display for SmoothExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root, Pos::Expr)
    }
}

fn needs_parens(node: &Node, pos: Pos) -> bool {
    match node {
        Node::Sum(_) => pos != Pos::Expr,
        Node::Product(_) => !matches!(pos, Pos::Expr | Pos::Term),
        Node::Pow(..) => matches!(pos, Pos::PowBase | Pos::NegOperand),
        Node::Neg(_) => matches!(pos, Pos::Factor | Pos::PowBase),
        Node::Const(q) if q.is_negative() => pos == Pos::PowBase,
        _ => false,
    }
}

fn write_node(f: &mut impl Write, node: &Node, pos: Pos) -> fmt::Result {
    if needs_parens(node, pos) {
        f.write_char('(')?;
        write_node(f, node, Pos::Expr)?;
        return f.write_char(')');
    }
    match node {
        Node::Var(i) => write!(f, "x{i}"),
        Node::Const(q) => f.write_str(&rational_decimal(q)),
        Node::Sum(cs) => {
            for (idx, c) in cs.iter().enumerate() {
                match &**c {
                    Node::Neg(inner) => {
                        f.write_char('-')?;
                        write_node(f, inner, Pos::NegOperand)?;
                    }
                    Node::Const(q) if q.is_negative() => {
                        f.write_char('-')?;
                        f.write_str(&rational_decimal(&-q.clone()))?;
                    }
                    _ => {
                        if idx > 0 {
                            f.write_char('+')?;
                        }
                        write_node(f, c, Pos::Term)?;
                    }
                }
            }
            Ok(())
        }
        Node::Product(cs) => {
            for (idx, c) in cs.iter().enumerate() {
                if idx > 0 {
                    f.write_char('*')?;
                }
                write_node(f, c, Pos::Factor)?;
            }
            Ok(())
        }
        Node::Neg(c) => {
            f.write_char('-')?;
            write_node(f, c, Pos::NegOperand)
        }
        Node::Pow(b, k) => {
            write_node(f, b, Pos::PowBase)?;
            write!(f, "^{k}")
        }
        Node::Prim(p, a) => {
            write!(f, "{p}(")?;
            write_node(f, a, Pos::Expr)?;
            f.write_char(')')
        }
        Node::PathIntegral(pi) => write_path_integral(f, pi),
    }
}

fn write_path_integral(f: &mut impl Write, pi: &PathIntegralNode) -> fmt::Result {
    write!(f, "pathint({}; {}; ", weight_string(&pi.weight), pi.integrand)?;
    for (idx, a) in pi.args.iter().enumerate() {
        if idx > 0 {
            f.write_str(",")?;
        }
        write_node(f, a, Pos::Expr)?;
    }
    f.write_char(')')
}

/// Renders the weight polynomial in the integration variable `t`.
fn weight_string(w: &[BigRational]) -> String {
    let mut out = String::new();
    for (k, c) in w.iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        let mag = c.abs();
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else if c.is_negative() {
            out.push('-');
        } else {
            out.push('+');
        }
        let show_coeff = k == 0 || !mag.is_one();
        if show_coeff {
            out.push_str(&rational_decimal(&mag));
        }
        if k >= 1 {
            if show_coeff {
                out.push('*');
            }
            out.push('t');
            if k >= 2 {
                out.push_str(&format!("^{k}"));
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

/// Exact decimal rendering of a rational whose denominator is `2^a 5^b`;
/// `p/q` fallback otherwise.
fn rational_decimal(q: &BigRational) -> String {
    if q.is_negative() {
        return format!("-{}", rational_decimal(&-q.clone()));
    }
    let numer = q.numer().clone();
    let denom = q.denom().clone();
    if denom.is_one() {
        return numer.to_string();
    }
    let mut d = denom.clone();
    let (mut twos, mut fives) = (0u32, 0u32);
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    while (&d % &two).is_zero() {
        d /= &two;
        twos += 1;
    }
    while (&d % &five).is_zero() {
        d /= &five;
        fives += 1;
    }
    if !d.is_one() {
        return format!("{numer}/{denom}");
    }
    let k = twos.max(fives);
    let scale = num_traits::pow(two, (k - twos) as usize) * num_traits::pow(five, (k - fives) as usize);
    let digits = (numer * scale).to_string();
    let k = k as usize;
    if digits.len() <= k {
        format!("0.{}{}", "0".repeat(k - digits.len()), digits)
    } else {
        let (int_part, frac_part) = digits.split_at(digits.len() - k);
        format!("{int_part}.{frac_part}")
    }
}

#[cfg(test)]
mod tests {
    use super::super::{Primitive, SmoothExpr};
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn x(arity: usize, i: usize) -> SmoothExpr {
        SmoothExpr::var(arity, i).unwrap()
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(rational_decimal(&rat(3, 1)), "3");
        assert_eq!(rational_decimal(&rat(3, 2)), "1.5");
        assert_eq!(rational_decimal(&rat(1, 8)), "0.125");
        assert_eq!(rational_decimal(&rat(-5, 4)), "-1.25");
        assert_eq!(rational_decimal(&rat(1, 20)), "0.05");
        // non-decimal denominators fall back to the fraction form
        assert_eq!(rational_decimal(&rat(1, 3)), "1/3");
    }

    #[test]
    fn prints_compact_sums_and_differences() {
        let e = &x(2, 1) - &x(2, 2);
        assert_eq!(e.to_string(), "x1-x2");
        let f = &(&x(2, 1) + &x(2, 2)) + &SmoothExpr::from_int(2, -3);
        assert_eq!(f.to_string(), "x1+x2-3");
    }

    #[test]
    fn prints_products_and_powers() {
        let e = &(&SmoothExpr::from_int(2, 2) * &x(2, 1)) * &x(2, 2);
        assert_eq!(e.to_string(), "2*x1*x2");
        let p = (&x(1, 1) + &SmoothExpr::one(1)).pow(3);
        assert_eq!(p.to_string(), "(x1+1)^3");
        let q = x(1, 1).pow(2).pow(3);
        assert_eq!(q.to_string(), "(x1^2)^3");
    }

    #[test]
    fn prints_negations() {
        let e = -&x(2, 2);
        assert_eq!(e.to_string(), "-x2");
        let f = -&x(1, 1).pow(2);
        assert_eq!(f.to_string(), "-(x1^2)");
        let g = &x(1, 1) * &(-&SmoothExpr::primitive(Primitive::Sin, &x(1, 1)));
        assert_eq!(g.to_string(), "x1*(-sin(x1))");
    }

    #[test]
    fn prints_primitives() {
        let e = &x(2, 1).pow(2) + &SmoothExpr::primitive(Primitive::Sin, &x(2, 2));
        assert_eq!(e.to_string(), "x1^2+sin(x2)");
    }

    #[test]
    fn prints_rational_constants_as_decimals() {
        let e = &SmoothExpr::constant(1, rat(3, 2)) * &x(1, 1);
        assert_eq!(e.to_string(), "1.5*x1");
    }

    #[test]
    fn weight_strings() {
        use num_traits::One;
        let one = BigRational::one();
        assert_eq!(weight_string(&[one.clone()]), "1");
        assert_eq!(weight_string(&[one.clone(), -one.clone()]), "1-t");
        assert_eq!(
            weight_string(&[BigRational::zero(), BigRational::zero(), rat(3, 2)]),
            "1.5*t^2"
        );
        assert_eq!(weight_string(&[]), "0");
    }

    #[test]
    fn prints_path_integrals_readably() {
        let f = SmoothExpr::primitive(Primitive::Sin, &x(1, 1));
        let g = &f.hadamard_decompose()[0];
        assert_eq!(g.to_string(), "pathint(1; cos(x1); x1,x2)");
    }
}
