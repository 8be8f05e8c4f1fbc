//! Real points of presented rings.
//!
//! A point of `C^inf(R^n) / I` is a tuple in `R^n` on which every relation
//! vanishes; equivalently, a ring morphism to the scalars.  [`point_verify`]
//! certifies a candidate tuple against a residual tolerance;
//! [`point_search`] seeds damped Gauss-Newton iteration on a rectangular
//! grid and returns the deduplicated, lexicographically sorted zeros it
//! reaches.  [`eval_morphism`] packages a verified point as a morphism to
//! the trivial ring, and [`pull_back_point`] transports points backwards
//! along a morphism.
//!
//! The search is deterministic: no randomness, fixed iteration budget,
//! fixed damping schedule.  On a presentation whose zero set is not
//! isolated (a curve, say) it returns a deterministic sample of nearby
//! zeros, one per Newton basin, rather than attempting to describe the
//! continuum.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::Zero;
use serde_json::{json, Value};
use std::cmp::Ordering;
use std::sync::Arc;

use crate::expr::SmoothExpr;
use crate::ring::{MorphismStatus, RingElement, RingMorphism, RingPresentation};

/// Default residual tolerance for point verification and search.
pub const DEFAULT_POINT_TOL: f64 = 1e-9;

/// Euclidean distance under which two found zeros are considered the same.
const DEDUP_TOL: f64 = 1e-6;
/// Iteration budget per seed.
const MAX_ITERS: usize = 80;
/// Damping values tried per step until the solve produces a usable update.
const DAMPING_SCHEDULE: [f64; 6] = [0.0, 1e-10, 1e-6, 1e-2, 1.0, 100.0];
/// Cap on the number of grid seeds.
const MAX_SEEDS: usize = 1_000_000;

/// Errors from point operations.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SpectrumError {
    #[error("expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("not a point: maximal relation residual {residual:e}")]
    NotAPoint { residual: f64 },
    #[error("grid must have at least one node per axis")]
    EmptyGrid,
    #[error("search bounds must be finite with lower <= upper")]
    InvalidBounds,
    #[error("search grid has {seeds} seeds, more than the budget of {budget}")]
    SearchTooLarge { seeds: usize, budget: usize },
}

/// A verified approximate real point: coordinates together with the maximal
/// relation residual observed there.
#[derive(Debug, Clone, PartialEq)]
pub struct RPoint {
    coords: Vec<f64>,
    residual: f64,
}

impl RPoint {
    /// The coordinates.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    /// The maximal absolute relation residual at the coordinates.
    pub fn residual(&self) -> f64 {
        self.residual
    }

    /// Serialization used by session files and reports.
    pub fn json_value(&self) -> Value {
        json!({ "coords": self.coords, "residual": self.residual })
    }
}

/// Maximal absolute relation residual at `coords` (zero for a free ring).
fn max_residual(ring: &RingPresentation, coords: &[f64]) -> f64 {
    ring.relations()
        .iter()
        .map(|r| {
            r.evaluate::<f64>(coords)
                .expect("f64 evaluation is total")
                .abs()
        })
        .fold(0.0, f64::max)
}

/// Certifies `coords` as a point of `ring`: every relation must vanish
/// there up to `tol`.
pub fn point_verify(
    ring: &Arc<RingPresentation>,
    coords: &[f64],
    tol: f64,
) -> Result<RPoint, SpectrumError> {
    if coords.len() != ring.num_gens() {
        return Err(SpectrumError::ArityMismatch {
            expected: ring.num_gens(),
            got: coords.len(),
        });
    }
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(SpectrumError::NotAPoint {
            residual: f64::INFINITY,
        });
    }
    let residual = max_residual(ring, coords);
    if residual.is_finite() && residual <= tol {
        Ok(RPoint {
            coords: coords.to_vec(),
            residual,
        })
    } else {
        Err(SpectrumError::NotAPoint { residual })
    }
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.partial_cmp(y).expect("found coordinates are finite") {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

fn euclidean_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Searches the box `bounds` for real points of `ring`.
///
/// Seeds a grid with `grid` nodes per axis (a single node sits at the box
/// center) and refines each seed by Gauss-Newton iteration on the relation
/// residuals, with a fixed damping schedule for rank-deficient Jacobians.
/// A refined seed is kept when its maximal residual is at most `tol`.
/// Results are deduplicated (distance `1e-6`) preferring smaller residuals,
/// and sorted lexicographically; converged zeros may lie slightly outside
/// the box, which only delimits the seeds.
pub fn point_search(
    ring: &Arc<RingPresentation>,
    bounds: &[(f64, f64)],
    grid: usize,
    tol: f64,
) -> Result<Vec<RPoint>, SpectrumError> {
    let n = ring.num_gens();
    if bounds.len() != n {
        return Err(SpectrumError::ArityMismatch {
            expected: n,
            got: bounds.len(),
        });
    }
    if grid == 0 {
        return Err(SpectrumError::EmptyGrid);
    }
    for &(lo, hi) in bounds {
        if !lo.is_finite() || !hi.is_finite() || lo > hi {
            return Err(SpectrumError::InvalidBounds);
        }
    }
    match grid.checked_pow(n as u32) {
        Some(seeds) if seeds <= MAX_SEEDS => {}
        _ => {
            return Err(SpectrumError::SearchTooLarge {
                seeds: usize::MAX,
                budget: MAX_SEEDS,
            })
        }
    }

    let axes: Vec<Vec<f64>> = bounds
        .iter()
        .map(|&(lo, hi)| {
            if grid == 1 {
                vec![(lo + hi) / 2.0]
            } else {
                (0..grid)
                    .map(|i| lo + (hi - lo) * i as f64 / (grid - 1) as f64)
                    .collect()
            }
        })
        .collect();

    let relations = ring.relations();
    let jacobian: Vec<Vec<SmoothExpr>> = relations
        .iter()
        .map(|r| {
            (1..=n)
                .map(|i| r.partial(i).expect("index in range"))
                .collect()
        })
        .collect();

    let mut found: Vec<RPoint> = Vec::new();
    let mut idx = vec![0usize; n];
    loop {
        let seed: Vec<f64> = idx.iter().enumerate().map(|(k, &i)| axes[k][i]).collect();
        if let Some(pt) = refine_seed(ring, relations, &jacobian, seed, tol) {
            found.push(pt);
        }
        // odometer increment over the seed grid
        let mut k = 0;
        loop {
            if k == n {
                break;
            }
            idx[k] += 1;
            if idx[k] < grid {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
        if k == n {
            break;
        }
    }

    // prefer smaller residuals when merging near-duplicates
    found.sort_by(|a, b| {
        a.residual
            .partial_cmp(&b.residual)
            .expect("residuals are finite")
            .then_with(|| lex_cmp(&a.coords, &b.coords))
    });
    let mut kept: Vec<RPoint> = Vec::new();
    for pt in found {
        if kept
            .iter()
            .all(|q| euclidean_distance(&pt.coords, &q.coords) > DEDUP_TOL)
        {
            kept.push(pt);
        }
    }
    kept.sort_by(|a, b| lex_cmp(&a.coords, &b.coords));
    Ok(kept)
}

fn refine_seed(
    ring: &RingPresentation,
    relations: &[SmoothExpr],
    jacobian: &[Vec<SmoothExpr>],
    seed: Vec<f64>,
    tol: f64,
) -> Option<RPoint> {
    let n = seed.len();
    let k = relations.len();
    let mut xv = seed;
    if k > 0 && n > 0 {
        for _ in 0..MAX_ITERS {
            let mut residuals = Vec::with_capacity(k);
            for r in relations {
                let v: f64 = r.evaluate(&xv).expect("f64 evaluation is total");
                if !v.is_finite() {
                    return None;
                }
                residuals.push(v);
            }
            let r_vec = DVector::from_vec(residuals);
            let mut jac = DMatrix::zeros(k, n);
            for (row, drow) in jacobian.iter().enumerate() {
                for (col, d) in drow.iter().enumerate() {
                    let v: f64 = d.evaluate(&xv).expect("f64 evaluation is total");
                    if !v.is_finite() {
                        return None;
                    }
                    jac[(row, col)] = v;
                }
            }
            let jt = jac.transpose();
            let normal = &jt * &jac;
            let grad = &jt * &r_vec;
            let mut step: Option<DVector<f64>> = None;
            for &lambda in &DAMPING_SCHEDULE {
                let mut damped = normal.clone();
                for i in 0..n {
                    damped[(i, i)] += lambda;
                }
                if let Some(delta) = damped.lu().solve(&(-&grad)) {
                    let ok = delta.iter().all(|d| d.is_finite())
                        && delta.norm() <= 1e3 * (1.0 + xv.iter().map(|c| c * c).sum::<f64>().sqrt());
                    if ok {
                        step = Some(delta);
                        break;
                    }
                }
            }
            let delta = step?;
            for (c, d) in xv.iter_mut().zip(delta.iter()) {
                *c += d;
            }
            let scale = 1.0 + xv.iter().map(|c| c * c).sum::<f64>().sqrt();
            if delta.norm() <= 1e-14 * scale {
                break;
            }
        }
    }
    if xv.iter().any(|c| !c.is_finite()) {
        return None;
    }
    let residual = max_residual(ring, &xv);
    if residual.is_finite() && residual <= tol {
        Some(RPoint {
            coords: xv,
            residual,
        })
    } else {
        None
    }
}

/// Packages a verified point as the evaluation morphism to the scalars.
///
/// The generator images are the coordinates as exact constants.  The status
/// is `ProvedWellDefined` when every relation is polynomial and vanishes
/// exactly at the (exactly read) coordinates, and `NumericallyConsistent`
/// otherwise.
pub fn eval_morphism(
    ring: &Arc<RingPresentation>,
    point: &RPoint,
) -> Result<RingMorphism, SpectrumError> {
    if point.coords.len() != ring.num_gens() {
        return Err(SpectrumError::ArityMismatch {
            expected: ring.num_gens(),
            got: point.coords.len(),
        });
    }
    // guard against a point paired with the wrong ring
    let residual = max_residual(ring, &point.coords);
    if !(residual <= point.residual + 1e-12 || residual <= DEFAULT_POINT_TOL) {
        return Err(SpectrumError::NotAPoint { residual });
    }

    let exact: Vec<BigRational> = point
        .coords
        .iter()
        .map(|&c| BigRational::from_float(c).expect("verified coordinates are finite"))
        .collect();
    let exactly_vanishing = ring.relations().iter().all(|r| {
        r.poly_normal_form()
            .map(|p| p.eval(&exact).expect("arity matches").is_zero())
            .unwrap_or(false)
    });
    let status = if exactly_vanishing {
        MorphismStatus::ProvedWellDefined
    } else {
        MorphismStatus::NumericallyConsistent
    };

    let scalars = RingPresentation::trivial();
    let images: Vec<RingElement> = exact
        .into_iter()
        .map(|q| {
            scalars
                .element(SmoothExpr::constant(0, q))
                .expect("constants have arity zero")
        })
        .collect();
    Ok(RingMorphism::raw(ring.clone(), scalars, images, status))
}

/// Transports a point of the target of `morphism` back to coordinates for
/// its source, by evaluating the generator images.
///
/// The result is not verified here; callers decide the tolerance for
/// [`point_verify`] on the source, since residuals can grow with the
/// steepness of the images.
pub fn pull_back_point(
    morphism: &RingMorphism,
    point: &RPoint,
) -> Result<Vec<f64>, SpectrumError> {
    if point.coords.len() != morphism.target().num_gens() {
        return Err(SpectrumError::ArityMismatch {
            expected: morphism.target().num_gens(),
            got: point.coords.len(),
        });
    }
    Ok(morphism
        .images()
        .iter()
        .map(|im| {
            im.rep()
                .evaluate(&point.coords)
                .expect("f64 evaluation is total")
        })
        .collect())
}
