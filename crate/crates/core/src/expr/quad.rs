//! Fixed 32-node Gauss-Legendre rule on `[0, 1]`.
//!
//! Backs the line-integral expression nodes.  The rule integrates
//! polynomials up to degree 63 exactly and is far below any tolerance this
//! crate uses for the analytic integrands that actually occur (compositions
//! of the smooth primitives along a segment).

use std::f64::consts::PI;
use std::sync::OnceLock;

const ORDER: usize = 32;

/// Nodes and weights of the 32-point Gauss-Legendre rule on `[0, 1]`,
/// sorted by node.  Computed once and cached.
pub(crate) fn gauss_legendre_01() -> &'static [(f64, f64)] {
    static RULE: OnceLock<Vec<(f64, f64)>> = OnceLock::new();
    RULE.get_or_init(|| compute(ORDER))
}

/// Legendre polynomial `P_n` and its derivative at `x`, by the three-term
/// recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let pk = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = pk;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn compute(n: usize) -> Vec<(f64, f64)> {
    let mut rule = Vec::with_capacity(n);
    for i in 0..n {
        // Tricomi-style initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push(((x + 1.0) / 2.0, w / 2.0));
    }
    rule.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite nodes"));
    rule
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        let total: f64 = gauss_legendre_01().iter().map(|&(_, w)| w).sum();
        assert!((total - 1.0).abs() < 1e-15);
    }

    #[test]
    fn integrates_monomials_exactly_through_degree_63() {
        for k in [0u32, 1, 2, 5, 17, 40, 63] {
            let quad: f64 = gauss_legendre_01()
                .iter()
                .map(|&(t, w)| w * t.powi(k as i32))
                .sum();
            let exact = 1.0 / (k as f64 + 1.0);
            assert!(
                (quad - exact).abs() < 1e-14,
                "degree {k}: {quad} vs {exact}"
            );
        }
    }

    #[test]
    fn integrates_exponential() {
        let quad: f64 = gauss_legendre_01().iter().map(|&(t, w)| w * t.exp()).sum();
        let exact = std::f64::consts::E - 1.0;
        assert!((quad - exact).abs() < 1e-14);
    }

    #[test]
    fn nodes_are_interior_and_sorted() {
        let rule = gauss_legendre_01();
        assert_eq!(rule.len(), 32);
        for pair in rule.windows(2) {
            assert!(pair[0].0 < pair[1].0);
        }
        assert!(rule[0].0 > 0.0 && rule[31].0 < 1.0);
    }
}
