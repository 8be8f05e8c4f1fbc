//! Parser for Weil element literals.
//!
//! A literal is a signed sum of terms, each a decimal coefficient times a
//! monomial in the algebra's nilpotent generators:
//!
//! ```text
//! literal  := [sign] term { sign term }
//! term     := number [monomial] | monomial
//! monomial := gen [power] { gen [power] }
//! power    := "^" digits | digits
//! ```
//!
//! Generator names depend on the generator count: `e` for one generator,
//! `a b` for two, `a b c` for three.  Examples: `1+1e` in the dual numbers,
//! `2-0.5a^2+1ab` in a two-generator algebra (also writable `2-0.5a2+1ab`).
//! Plain decimals only — scientific notation would collide with the
//! generator `e`.

use std::sync::Arc;

use cinfty::weil::{WeilAlgebra, WeilElement};

/// Single-letter generator names used by literals and reports.
pub fn gen_names(num_gens: usize) -> Result<Vec<char>, String> {
    match num_gens {
        0 => Ok(vec![]),
        1 => Ok(vec!['e']),
        2 => Ok(vec!['a', 'b']),
        3 => Ok(vec!['a', 'b', 'c']),
        n => Err(format!(
            "element literals support at most 3 generators, algebra has {n}"
        )),
    }
}

/// Parses `text` as an element of `algebra`, returning coordinates over the
/// algebra's monomial basis.
pub fn parse_weil_literal(
    text: &str,
    algebra: &Arc<WeilAlgebra>,
) -> Result<WeilElement<f64>, String> {
    let names = gen_names(algebra.num_gens())?;
    let mut coords = vec![0.0f64; algebra.dimension()];
    let bytes = text.as_bytes();
    let mut pos = 0usize;

    skip_spaces(bytes, &mut pos);
    if pos == bytes.len() {
        return Err("empty element literal".into());
    }
    let mut first = true;
    while pos < bytes.len() {
        let sign = match bytes[pos] {
            b'+' => {
                pos += 1;
                1.0
            }
            b'-' => {
                pos += 1;
                -1.0
            }
            _ if first => 1.0,
            other => {
                return Err(format!(
                    "expected `+` or `-` before a term, found `{}`",
                    other as char
                ))
            }
        };
        first = false;
        skip_spaces(bytes, &mut pos);

        let scanned = scan_number(bytes, &mut pos);
        let saw_number = scanned.is_some();
        let coeff = match scanned {
            Some(c) => c?,
            None => 1.0,
        };
        skip_spaces(bytes, &mut pos);

        let mut exponents = vec![0u32; algebra.num_gens()];
        let mut saw_gen = false;
        while pos < bytes.len() && bytes[pos].is_ascii_alphabetic() {
            let letter = bytes[pos] as char;
            let index = names
                .iter()
                .position(|&g| g == letter)
                .ok_or_else(|| format!("unknown generator `{letter}`, expected one of {names:?}"))?;
            pos += 1;
            let mut power = 1u32;
            if pos < bytes.len() && bytes[pos] == b'^' {
                pos += 1;
                power = scan_uint(bytes, &mut pos)
                    .ok_or_else(|| format!("missing exponent after `{letter}^`"))?;
            } else if pos < bytes.len() && bytes[pos].is_ascii_digit() {
                power = scan_uint(bytes, &mut pos).expect("digit present");
            }
            exponents[index] += power;
            saw_gen = true;
        }
        if !saw_number && !saw_gen {
            return Err(format!("expected a term at position {pos} in `{text}`"));
        }

        let slot = algebra
            .basis()
            .iter()
            .position(|m| m.exponents() == exponents.as_slice())
            .ok_or_else(|| {
                format!(
                    "monomial with exponents {exponents:?} is not in the reduced basis of the algebra"
                )
            })?;
        coords[slot] += sign * coeff;
        skip_spaces(bytes, &mut pos);
    }

    algebra
        .element(coords)
        .map_err(|e| format!("element construction failed: {e}"))
}

fn skip_spaces(bytes: &[u8], pos: &mut usize) {
    while *pos < bytes.len() && bytes[*pos] == b' ' {
        *pos += 1;
    }
}

/// Scans a decimal number `digits[.digits]`.  Returns `None` when `pos` does
/// not start a number, `Some(Err)` on a malformed one.
fn scan_number(bytes: &[u8], pos: &mut usize) -> Option<Result<f64, String>> {
    let start = *pos;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        *pos += 1;
    }
    if *pos == start {
        return None;
    }
    if *pos < bytes.len() && bytes[*pos] == b'.' {
        *pos += 1;
        let frac_start = *pos;
        while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
            *pos += 1;
        }
        if *pos == frac_start {
            return Some(Err(format!(
                "missing digits after decimal point at position {frac_start}"
            )));
        }
    }
    let text = std::str::from_utf8(&bytes[start..*pos]).expect("ASCII digits");
    Some(text.parse::<f64>().map_err(|e| e.to_string()))
}

fn scan_uint(bytes: &[u8], pos: &mut usize) -> Option<u32> {
    let start = *pos;
    let mut value = 0u32;
    while *pos < bytes.len() && bytes[*pos].is_ascii_digit() {
        value = value
            .saturating_mul(10)
            .saturating_add((bytes[*pos] - b'0') as u32);
        *pos += 1;
    }
    (*pos > start).then_some(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dual() -> Arc<WeilAlgebra> {
        WeilAlgebra::new(1, 2, &[]).expect("dual numbers")
    }

    fn two_gen() -> Arc<WeilAlgebra> {
        WeilAlgebra::new(2, 3, &[]).expect("order-3 truncation in a, b")
    }

    #[test]
    fn dual_literal_reads_both_coordinates() {
        let w = parse_weil_literal("1+1e", &dual()).expect("parse");
        assert_eq!(w.coords(), &[1.0, 1.0]);
    }

    #[test]
    fn signs_coefficients_and_bare_generators() {
        let w = parse_weil_literal("-2.5 + e - 0.5e", &dual()).expect("parse");
        assert_eq!(w.coords(), &[-2.5, 0.5]);
    }

    #[test]
    fn powers_in_both_spellings() {
        let a = two_gen();
        // Basis of R[a,b]/m^3 in graded order: 1, a, b, a^2, ab, b^2.
        let w = parse_weil_literal("1+2a+3b^2+4a2+5ab", &a).expect("parse");
        let mut expected = vec![0.0; a.dimension()];
        for (exps, c) in [
            (vec![0u32, 0], 1.0),
            (vec![1, 0], 2.0),
            (vec![0, 2], 3.0),
            (vec![2, 0], 4.0),
            (vec![1, 1], 5.0),
        ] {
            let slot = a
                .basis()
                .iter()
                .position(|m| m.exponents() == exps.as_slice())
                .expect("basis slot");
            expected[slot] = c;
        }
        assert_eq!(w.coords(), expected.as_slice());
    }

    #[test]
    fn monomials_outside_the_basis_are_rejected() {
        let err = parse_weil_literal("1+1e^2", &dual()).expect_err("e^2 dies in dual numbers");
        assert!(err.contains("not in the reduced basis"), "got: {err}");
    }

    #[test]
    fn unknown_generator_names_are_rejected() {
        let err = parse_weil_literal("1+1z", &dual()).expect_err("no such generator");
        assert!(err.contains("unknown generator"), "got: {err}");
    }

    #[test]
    fn malformed_literals_are_rejected() {
        assert!(parse_weil_literal("", &dual()).is_err());
        assert!(parse_weil_literal("1 2", &dual()).is_err());
        assert!(parse_weil_literal("1..5", &dual()).is_err());
    }
}
