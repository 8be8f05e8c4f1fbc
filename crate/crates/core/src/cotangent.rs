//! Finitely presented modules and cotangent modules.
//!
//! An [`FPModule`] over a presented ring `C` is a cokernel presentation:
//! `num_gens` generators and finitely many relation rows with entries in
//! `C`.  The cotangent module of a presentation `C^inf(R^n)/(f_1..f_k)` has
//! generators `dx_1..dx_n` and one Jacobian row per relation, since the
//! universal derivation forces `sum_i (df_j/dx_i) dx_i = 0`.
//!
//! [`cotangent_morphism`] realizes the chain rule as a matrix between
//! cotangent modules pushed forward along a ring morphism, and
//! [`pushout_cotangent_sequence`] assembles, for a pushout square, the
//! three-term sequence
//!
//! ```text
//! Omega_C (x) F  -->  Omega_D (x) F (+) Omega_E (x) F  -->  Omega_F  -->  0
//! ```
//!
//! whose exactness [`sequence_check_pointwise`] tests at real points: all
//! matrices are evaluated to real matrices and the resulting sequences of
//! finite-dimensional vector spaces are checked by rank arithmetic.  This
//! is a necessary condition for module exactness, not a proof — module
//! exactness over these non-noetherian rings has no decision procedure in
//! this representation — and the report says exactly what was checked.

use nalgebra::DMatrix;
use serde_json::{json, Value};
use std::sync::Arc;

use crate::ring::{
    same_ring, MorphismStatus, PushoutData, RingElement, RingError, RingMorphism,
    RingPresentation,
};
use crate::spectrum::{self, RPoint};

/// Singular values below this are treated as zero in rank computations.
const RANK_EPS: f64 = 1e-8;

/// Errors from module construction and the sequence checker.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModuleError {
    #[error("module data belongs to a different ring")]
    RingMismatch,
    #[error("relation row has {got} entries, expected {expected}")]
    RowLength { expected: usize, got: usize },
    #[error("matrix shape {rows}x{cols} does not map {source_gens} generators to {target_gens}")]
    MatrixShape {
        rows: usize,
        cols: usize,
        source_gens: usize,
        target_gens: usize,
    },
    #[error("morphisms do not compose: source and target modules differ")]
    ChainMismatch,
    #[error("the underlying ring morphism is falsified")]
    MorphismFalsified,
    #[error("pushout data does not match the glued morphisms")]
    PushoutMismatch,
    #[error("expected {expected} coordinates, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("not a point of the sequence's ring: residual {residual:e}")]
    NotAPoint { residual: f64 },
    #[error(transparent)]
    Ring(#[from] RingError),
}

/// A finitely presented module: the cokernel of the relation rows acting on
/// a free module of rank `num_gens`.
#[derive(Debug)]
pub struct FPModule {
    ring: Arc<RingPresentation>,
    num_gens: usize,
    rows: Vec<Vec<RingElement>>,
}

impl PartialEq for FPModule {
    fn eq(&self, other: &Self) -> bool {
        self.num_gens == other.num_gens
            && same_ring(&self.ring, &other.ring)
            && self.rows.len() == other.rows.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.iter().zip(b).all(|(x, y)| x.rep() == y.rep()))
    }
}

fn same_module(a: &Arc<FPModule>, b: &Arc<FPModule>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl FPModule {
    /// A module from explicit presentation rows.
    pub fn new(
        ring: &Arc<RingPresentation>,
        num_gens: usize,
        rows: Vec<Vec<RingElement>>,
    ) -> Result<Arc<Self>, ModuleError> {
        for row in &rows {
            if row.len() != num_gens {
                return Err(ModuleError::RowLength {
                    expected: num_gens,
                    got: row.len(),
                });
            }
            for entry in row {
                if !same_ring(entry.ring(), ring) {
                    return Err(ModuleError::RingMismatch);
                }
            }
        }
        Ok(Arc::new(FPModule {
            ring: ring.clone(),
            num_gens,
            rows,
        }))
    }

    /// The ambient ring.
    pub fn ring(&self) -> &Arc<RingPresentation> {
        &self.ring
    }

    /// Number of module generators.
    pub fn num_gens(&self) -> usize {
        self.num_gens
    }

    /// Presentation rows; each row is one relation among the generators.
    pub fn rows(&self) -> &[Vec<RingElement>] {
        &self.rows
    }

    /// Whether the presentation has no relation rows.
    pub fn is_free(&self) -> bool {
        self.rows.is_empty()
    }

    /// Serialization used by session files and reports.
    pub fn json_value(&self) -> Value {
        json!({
            "ring": self.ring.label(),
            "n_gens": self.num_gens,
            "rows": self
                .rows
                .iter()
                .map(|row| row.iter().map(|e| e.rep().to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
        })
    }
}

/// The free module of the given rank: no relation rows.
pub fn free_module(ring: &Arc<RingPresentation>, rank: usize) -> Arc<FPModule> {
    FPModule::new(ring, rank, Vec::new()).expect("no rows to check")
}

/// The cotangent module of a presentation: generators `dx_1..dx_n`, one
/// Jacobian row per ring relation.
pub fn cotangent_module(ring: &Arc<RingPresentation>) -> Arc<FPModule> {
    let n = ring.num_gens();
    let rows = ring
        .relations()
        .iter()
        .map(|f| {
            (1..=n)
                .map(|i| {
                    let d = f.partial(i).expect("index in range");
                    ring.element(d).expect("arity preserved by partial")
                })
                .collect()
        })
        .collect();
    FPModule::new(ring, n, rows).expect("rows have length n by construction")
}

/// Extension of scalars `M (x)_C D` along `phi: C -> D`: same generators,
/// relation entries mapped through `phi`.
pub fn module_pushforward(
    module: &Arc<FPModule>,
    phi: &RingMorphism,
) -> Result<Arc<FPModule>, ModuleError> {
    if !same_ring(&module.ring, phi.source()) {
        return Err(ModuleError::RingMismatch);
    }
    let mut rows = Vec::with_capacity(module.rows.len());
    for row in &module.rows {
        let mut mapped = Vec::with_capacity(row.len());
        for entry in row {
            mapped.push(phi.apply(entry)?);
        }
        rows.push(mapped);
    }
    FPModule::new(phi.target(), module.num_gens, rows)
}

/// Block direct sum `A (+) B` over a common ring: generators are the `A`
/// generators followed by the `B` generators, rows are zero-padded.
pub fn direct_sum(a: &Arc<FPModule>, b: &Arc<FPModule>) -> Result<Arc<FPModule>, ModuleError> {
    if !same_ring(&a.ring, &b.ring) {
        return Err(ModuleError::RingMismatch);
    }
    let ring = &a.ring;
    let zero = ring.zero();
    let total = a.num_gens + b.num_gens;
    let mut rows = Vec::with_capacity(a.rows.len() + b.rows.len());
    for row in &a.rows {
        let mut r = row.clone();
        r.extend(std::iter::repeat_with(|| zero.clone()).take(b.num_gens));
        rows.push(r);
    }
    for row in &b.rows {
        let mut r: Vec<RingElement> = std::iter::repeat_with(|| zero.clone())
            .take(a.num_gens)
            .collect();
        r.extend(row.iter().cloned());
        rows.push(r);
    }
    FPModule::new(ring, total, rows)
}

/// A morphism of finitely presented modules over a common ring, given by a
/// `target.num_gens x source.num_gens` matrix: column `i` is the image of
/// the `i`-th source generator.
#[derive(Debug, Clone)]
pub struct ModuleMorphism {
    source: Arc<FPModule>,
    target: Arc<FPModule>,
    matrix: Vec<Vec<RingElement>>,
    status: MorphismStatus,
}

impl ModuleMorphism {
    /// Builds a morphism and attempts a cheap well-definedness certificate.
    ///
    /// The status is `ProvedWellDefined` when the source has no relation
    /// rows, or when the image of every source row is certified inside the
    /// target's relation submodule (entrywise provably zero, or provably
    /// equal to an existing target row up to sign).  Otherwise the status
    /// is `NumericallyConsistent`: membership in a relation submodule has
    /// no general decision procedure here, and the pointwise sequence
    /// checker is the ultimate referee.
    pub fn new(
        source: &Arc<FPModule>,
        target: &Arc<FPModule>,
        matrix: Vec<Vec<RingElement>>,
    ) -> Result<Self, ModuleError> {
        if !same_ring(&source.ring, &target.ring) {
            return Err(ModuleError::RingMismatch);
        }
        if matrix.len() != target.num_gens
            || matrix.iter().any(|row| row.len() != source.num_gens)
        {
            return Err(ModuleError::MatrixShape {
                rows: matrix.len(),
                cols: matrix.first().map_or(0, Vec::len),
                source_gens: source.num_gens,
                target_gens: target.num_gens,
            });
        }
        for row in &matrix {
            for entry in row {
                if !same_ring(entry.ring(), &source.ring) {
                    return Err(ModuleError::RingMismatch);
                }
            }
        }
        let mut status = MorphismStatus::ProvedWellDefined;
        for row in &source.rows {
            let image = apply_matrix(&matrix, row, &target.ring);
            if !row_certified_in_submodule(&image, &target.rows)? {
                status = MorphismStatus::NumericallyConsistent;
                break;
            }
        }
        Ok(ModuleMorphism {
            source: source.clone(),
            target: target.clone(),
            matrix,
            status,
        })
    }

    /// The identity morphism of a module.
    pub fn identity(module: &Arc<FPModule>) -> Self {
        let ring = &module.ring;
        let matrix = (0..module.num_gens)
            .map(|j| {
                (0..module.num_gens)
                    .map(|i| if i == j { ring.one() } else { ring.zero() })
                    .collect()
            })
            .collect();
        ModuleMorphism {
            source: module.clone(),
            target: module.clone(),
            matrix,
            status: MorphismStatus::ProvedWellDefined,
        }
    }

    /// Source module.
    pub fn source(&self) -> &Arc<FPModule> {
        &self.source
    }

    /// Target module.
    pub fn target(&self) -> &Arc<FPModule> {
        &self.target
    }

    /// The matrix, rows indexed by target generators.
    pub fn matrix(&self) -> &[Vec<RingElement>] {
        &self.matrix
    }

    /// Verification status of the well-definedness contract.
    pub fn status(&self) -> MorphismStatus {
        self.status
    }

    /// Composite `later . earlier` by matrix multiplication; the status is
    /// the weaker of the two.
    pub fn compose(
        later: &ModuleMorphism,
        earlier: &ModuleMorphism,
    ) -> Result<ModuleMorphism, ModuleError> {
        if !same_module(&later.source, &earlier.target) {
            return Err(ModuleError::ChainMismatch);
        }
        let ring = &later.target.ring;
        let mut matrix = Vec::with_capacity(later.target.num_gens);
        for j in 0..later.target.num_gens {
            let mut row = Vec::with_capacity(earlier.source.num_gens);
            for i in 0..earlier.source.num_gens {
                let mut acc = ring.zero();
                for k in 0..later.source.num_gens {
                    acc = &acc + &(&later.matrix[j][k] * &earlier.matrix[k][i]);
                }
                row.push(acc);
            }
            matrix.push(row);
        }
        Ok(ModuleMorphism {
            source: earlier.source.clone(),
            target: later.target.clone(),
            matrix,
            status: later.status.weaker(earlier.status),
        })
    }

    /// Serialization used by session files and reports.
    pub fn json_value(&self) -> Value {
        json!({
            "matrix": self
                .matrix
                .iter()
                .map(|row| row.iter().map(|e| e.rep().to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "status": self.status.as_str(),
        })
    }
}

/// Matrix times coefficient column: the image of the relation `sum_i row[i]
/// e_i` under the morphism with the given matrix.
fn apply_matrix(
    matrix: &[Vec<RingElement>],
    row: &[RingElement],
    ring: &Arc<RingPresentation>,
) -> Vec<RingElement> {
    matrix
        .iter()
        .map(|mrow| {
            let mut acc = ring.zero();
            for (entry, coeff) in mrow.iter().zip(row) {
                acc = &acc + &(entry * coeff);
            }
            acc
        })
        .collect()
}

/// Cheap membership certificate for a row in the span of `rows`: entrywise
/// provably zero, or provably equal to one of the rows up to sign.
fn row_certified_in_submodule(
    image: &[RingElement],
    rows: &[Vec<RingElement>],
) -> Result<bool, ModuleError> {
    let mut all_zero = true;
    for entry in image {
        let zero = entry.ring().zero();
        if entry.equal_mod_ideal(&zero)? != crate::ring::CosetVerdict::ProvedEqual {
            all_zero = false;
            break;
        }
    }
    if all_zero {
        return Ok(true);
    }
    for row in rows {
        for sign in [1, -1] {
            let mut matches = true;
            for (a, b) in image.iter().zip(row) {
                let candidate = if sign == 1 { b.clone() } else { -b };
                if a.equal_mod_ideal(&candidate)? != crate::ring::CosetVerdict::ProvedEqual {
                    matches = false;
                    break;
                }
            }
            if matches {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// The chain-rule morphism `(Omega_phi)_*: Omega_C (x) D -> Omega_D` for
/// `phi: C -> D`.
///
/// Column `i` (the image of `dx_i` from the source) is the gradient of the
/// `i`-th generator image: `[d(phi_i)/dy_1, .., d(phi_i)/dy_nD]`.
pub fn cotangent_morphism(phi: &RingMorphism) -> Result<ModuleMorphism, ModuleError> {
    if phi.status() == MorphismStatus::Falsified {
        return Err(ModuleError::MorphismFalsified);
    }
    let source = module_pushforward(&cotangent_module(phi.source()), phi)?;
    let target = cotangent_module(phi.target());
    let n_target = phi.target().num_gens();
    let n_source = phi.source().num_gens();
    let mut matrix = Vec::with_capacity(n_target);
    for j in 1..=n_target {
        let mut row = Vec::with_capacity(n_source);
        for im in phi.images() {
            let d = im.rep().partial(j).expect("index in range");
            row.push(phi.target().element(d)?);
        }
        matrix.push(row);
    }
    ModuleMorphism::new(&source, &target, matrix)
}

/// The cotangent three-term sequence of a pushout square.
#[derive(Debug, Clone)]
pub struct CotangentSequence {
    ring: Arc<RingPresentation>,
    /// Generator count of the `D`-block inside the middle module.
    split: usize,
    map1: ModuleMorphism,
    map2: ModuleMorphism,
}

impl CotangentSequence {
    /// The glued ring `F` everything is defined over.
    pub fn ring(&self) -> &Arc<RingPresentation> {
        &self.ring
    }

    /// `Omega_C (x) F`.
    pub fn left(&self) -> &Arc<FPModule> {
        self.map1.source()
    }

    /// `Omega_D (x) F (+) Omega_E (x) F`.
    pub fn middle(&self) -> &Arc<FPModule> {
        self.map1.target()
    }

    /// `Omega_F`.
    pub fn right(&self) -> &Arc<FPModule> {
        self.map2.target()
    }

    /// `(Omega_alpha)_* (+) -(Omega_beta)_*`.
    pub fn map1(&self) -> &ModuleMorphism {
        &self.map1
    }

    /// `(Omega_gamma)_* (+) (Omega_delta)_*`.
    pub fn map2(&self) -> &ModuleMorphism {
        &self.map2
    }

    /// The deliberately wrong variant with the minus sign of the `E`-block
    /// of the first map dropped; used to validate that the pointwise
    /// checker can tell a correct sequence from an incorrect one.
    pub fn corrupt_map1_sign(&self) -> CotangentSequence {
        let mut matrix = self.map1.matrix.clone();
        for row in matrix.iter_mut().skip(self.split) {
            for entry in row.iter_mut() {
                *entry = -&*entry;
            }
        }
        let map1 = ModuleMorphism {
            source: self.map1.source.clone(),
            target: self.map1.target.clone(),
            matrix,
            status: MorphismStatus::NumericallyConsistent,
        };
        CotangentSequence {
            ring: self.ring.clone(),
            split: self.split,
            map1,
            map2: self.map2.clone(),
        }
    }
}

/// Assembles the cotangent sequence of the pushout of `alpha: C -> D` and
/// `beta: C -> E`, with `data` as produced by [`crate::ring::pushout`].
pub fn pushout_cotangent_sequence(
    alpha: &RingMorphism,
    beta: &RingMorphism,
    data: &PushoutData,
) -> Result<CotangentSequence, ModuleError> {
    if !same_ring(alpha.source(), beta.source())
        || !same_ring(alpha.target(), data.left.source())
        || !same_ring(beta.target(), data.right.source())
        || !same_ring(data.left.target(), &data.ring)
        || !same_ring(data.right.target(), &data.ring)
    {
        return Err(ModuleError::PushoutMismatch);
    }
    let gamma = &data.left;
    let delta = &data.right;

    // everything is pushed forward to F
    let through = RingMorphism::compose(gamma, alpha)?;
    let left = module_pushforward(&cotangent_module(alpha.source()), &through)?;
    let omega_d = module_pushforward(&cotangent_module(alpha.target()), gamma)?;
    let omega_e = module_pushforward(&cotangent_module(beta.target()), delta)?;
    let middle = direct_sum(&omega_d, &omega_e)?;
    let right = cotangent_module(&data.ring);

    // map1 = (Omega_alpha)_* stacked over -(Omega_beta)_*, entries in F
    let omega_alpha = cotangent_morphism(alpha)?;
    let omega_beta = cotangent_morphism(beta)?;
    let n_c = alpha.source().num_gens();
    let mut m1: Vec<Vec<RingElement>> = Vec::with_capacity(middle.num_gens());
    for row in &omega_alpha.matrix {
        let mut out = Vec::with_capacity(n_c);
        for entry in row {
            out.push(gamma.apply(entry)?);
        }
        m1.push(out);
    }
    for row in &omega_beta.matrix {
        let mut out = Vec::with_capacity(n_c);
        for entry in row {
            out.push(-&delta.apply(entry)?);
        }
        m1.push(out);
    }

    // map2 = [(Omega_gamma)_* | (Omega_delta)_*], entries in F
    let omega_gamma = cotangent_morphism(gamma)?;
    let omega_delta = cotangent_morphism(delta)?;
    let mut m2: Vec<Vec<RingElement>> = Vec::with_capacity(right.num_gens());
    for (grow, drow) in omega_gamma.matrix.iter().zip(&omega_delta.matrix) {
        let mut out = Vec::with_capacity(middle.num_gens());
        out.extend(grow.iter().cloned());
        out.extend(drow.iter().cloned());
        m2.push(out);
    }

    let split = omega_d.num_gens();
    let map1 = ModuleMorphism::new(&left, &middle, m1)?;
    let map2 = ModuleMorphism::new(&middle, &right, m2)?;
    Ok(CotangentSequence {
        ring: data.ring.clone(),
        split,
        map1,
        map2,
    })
}

/// Per-point outcome of the sequence checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointVerdict {
    Exact,
    Violated,
}

impl PointVerdict {
    /// Stable machine-readable name.
    pub fn as_str(self) -> &'static str {
        match self {
            PointVerdict::Exact => "exact",
            PointVerdict::Violated => "violated",
        }
    }
}

/// Evaluation of the sequence at one real point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCheck {
    /// The point the matrices were evaluated at.
    pub coords: Vec<f64>,
    /// Largest residual of a composed column against the span of the
    /// evaluated right-hand relation rows.
    pub composition_residual: f64,
    /// Dimension of the image of the first map inside the middle cokernel.
    pub image_rank: usize,
    /// Dimension of the kernel of the induced second map on the middle
    /// cokernel.
    pub kernel_dim: usize,
    /// Whether the second map surjects onto the evaluated right cokernel.
    pub surjective: bool,
    pub verdict: PointVerdict,
}

impl PointCheck {
    /// Serialization used by reports.
    pub fn json_value(&self) -> Value {
        json!({
            "coords": self.coords,
            "composition_residual": self.composition_residual,
            "ranks": { "image": self.image_rank, "kernel": self.kernel_dim },
            "surjective": self.surjective,
            "verdict": self.verdict.as_str(),
        })
    }
}

/// Report of [`sequence_check_pointwise`]: one entry per point, in
/// lexicographic point order.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactSeqReport {
    pub tol: f64,
    pub points: Vec<PointCheck>,
}

impl ExactSeqReport {
    /// Whether every checked point came out exact.
    pub fn all_exact(&self) -> bool {
        self.points.iter().all(|p| p.verdict == PointVerdict::Exact)
    }

    /// Serialization used by reports.
    pub fn json_value(&self) -> Value {
        json!({
            "tol": self.tol,
            "all_exact": self.all_exact(),
            "points": self.points.iter().map(PointCheck::json_value).collect::<Vec<_>>(),
        })
    }
}

fn eval_rows(rows: &[Vec<RingElement>], ncols: usize, coords: &[f64]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), ncols, |r, c| {
        rows[r][c]
            .rep()
            .evaluate(coords)
            .expect("f64 evaluation is total")
    })
}

fn svd_rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .filter(|s| **s > RANK_EPS)
        .count()
}

fn hcat(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert_eq!(a.nrows(), b.nrows());
    DMatrix::from_fn(a.nrows(), a.ncols() + b.ncols(), |r, c| {
        if c < a.ncols() {
            a[(r, c)]
        } else {
            b[(r, c - a.ncols())]
        }
    })
}

/// Orthonormal basis of the column span (columns with singular value above
/// the rank threshold).
fn column_span_basis(m: &DMatrix<f64>) -> DMatrix<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return DMatrix::zeros(m.nrows(), 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested");
    let kept: Vec<usize> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s > RANK_EPS)
        .map(|(i, _)| i)
        .collect();
    DMatrix::from_fn(m.nrows(), kept.len(), |r, c| u[(r, kept[c])])
}

/// Evaluates the sequence at each point and checks exactness of the
/// resulting real sequences by rank arithmetic.
///
/// At a point `p` with first map `A`, second map `B`, middle relation rows
/// `R_M` and right relation rows `R_F` (all evaluated):
///
/// 1. every column of `B A` must lie in the row span of `R_F` up to `tol`
///    (the composite is zero in the evaluated right cokernel);
/// 2. `B` together with `R_F` must span all of the right-hand generators
///    (the second map surjects onto the evaluated cokernel);
/// 3. the image of `A` in the middle cokernel must have the same dimension
///    as the kernel of the induced `B` there.
///
/// Singular values below `1e-8` count as zero.  The report lists points in
/// lexicographic order.  A pass certifies exactness of the evaluated
/// sequences only; it is a necessary condition for module exactness.
pub fn sequence_check_pointwise(
    seq: &CotangentSequence,
    points: &[RPoint],
    tol: f64,
) -> Result<ExactSeqReport, ModuleError> {
    let ring = &seq.ring;
    let n_f = seq.right().num_gens();
    let n_m = seq.middle().num_gens();
    let mut checks = Vec::with_capacity(points.len());
    for pt in points {
        if pt.coords().len() != ring.num_gens() {
            return Err(ModuleError::ArityMismatch {
                expected: ring.num_gens(),
                got: pt.coords().len(),
            });
        }
        let accept = spectrum::DEFAULT_POINT_TOL.max(pt.residual() * (1.0 + 1e-9) + 1e-12);
        if let Err(spectrum::SpectrumError::NotAPoint { residual }) =
            spectrum::point_verify(ring, pt.coords(), accept)
        {
            return Err(ModuleError::NotAPoint { residual });
        }
        let coords = pt.coords();

        let a = eval_rows(&seq.map1.matrix, seq.left().num_gens(), coords);
        let b = eval_rows(&seq.map2.matrix, n_m, coords);
        let r_m = eval_rows(seq.middle().rows(), n_m, coords).transpose();
        let r_f = eval_rows(seq.right().rows(), n_f, coords).transpose();

        // (1) composed columns against the right relation span
        let ba = &b * &a;
        let q = column_span_basis(&r_f);
        let mut composition_residual = 0.0f64;
        for c in 0..ba.ncols() {
            let col = ba.column(c).into_owned();
            let resid = if q.ncols() == 0 {
                col.norm()
            } else {
                (&col - &q * (q.transpose() * &col)).norm()
            };
            composition_residual = composition_residual.max(resid);
        }

        // (2) surjectivity onto the evaluated cokernel
        let rank_rf = svd_rank(&r_f);
        let rank_b_rf = svd_rank(&hcat(&b, &r_f));
        let surjective = rank_b_rf == n_f;

        // (3) image of map1 vs kernel of induced map2 in the middle cokernel
        let rank_rm = svd_rank(&r_m);
        let image_rank = svd_rank(&hcat(&a, &r_m)) - rank_rm;
        let middle_dim = n_m - rank_rm;
        let induced_rank = rank_b_rf - rank_rf;
        let kernel_dim = middle_dim.saturating_sub(induced_rank);

        let verdict = if composition_residual <= tol && surjective && image_rank == kernel_dim {
            PointVerdict::Exact
        } else {
            PointVerdict::Violated
        };
        checks.push(PointCheck {
            coords: coords.to_vec(),
            composition_residual,
            image_rank,
            kernel_dim,
            surjective,
            verdict,
        });
    }
    checks.sort_by(|x, y| spectrum::lex_cmp(&x.coords, &y.coords));
    Ok(ExactSeqReport { tol, points: checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{Primitive, SmoothExpr};
    use crate::ring::{pushout, CosetVerdict};

    fn x(arity: usize, i: usize) -> SmoothExpr {
        SmoothExpr::var(arity, i).unwrap()
    }

    fn poly_eq(a: &RingElement, b: &SmoothExpr) -> bool {
        a.rep().poly_normal_form() == b.poly_normal_form()
            && a.rep().poly_normal_form().is_some()
    }

    #[test]
    fn free_modules_have_no_rows() {
        let ring = RingPresentation::free("C", 2);
        let zero = free_module(&ring, 0);
        assert_eq!(zero.num_gens(), 0);
        assert!(zero.is_free());
        let m = free_module(&ring, 2);
        assert_eq!(m.num_gens(), 2);
        assert!(m.rows().is_empty());
    }

    #[test]
    fn cotangent_of_free_ring_is_free() {
        for n in 0..=4 {
            let ring = RingPresentation::free("F", n);
            let omega = cotangent_module(&ring);
            assert_eq!(omega.num_gens(), n);
            assert!(omega.is_free());
        }
    }

    #[test]
    fn cotangent_of_fat_point_has_jacobian_row() {
        let ring = RingPresentation::new("D", 1, vec![x(1, 1).pow(2)]).unwrap();
        let omega = cotangent_module(&ring);
        assert_eq!(omega.num_gens(), 1);
        assert_eq!(omega.rows().len(), 1);
        let two_x = &SmoothExpr::from_int(1, 2) * &x(1, 1);
        assert!(poly_eq(&omega.rows()[0][0], &two_x));
        assert_eq!(omega.rows()[0][0].rep().to_string(), "2*x1");
    }

    #[test]
    fn cotangent_of_circle_is_the_gradient_row() {
        let rel = &(&x(2, 1).pow(2) + &x(2, 2).pow(2)) - &SmoothExpr::one(2);
        let ring = RingPresentation::new("S1", 2, vec![rel]).unwrap();
        let omega = cotangent_module(&ring);
        assert_eq!(omega.num_gens(), 2);
        assert_eq!(omega.rows().len(), 1);
        let row = &omega.rows()[0];
        assert!(poly_eq(&row[0], &(&SmoothExpr::from_int(2, 2) * &x(2, 1))));
        assert!(poly_eq(&row[1], &(&SmoothExpr::from_int(2, 2) * &x(2, 2))));
    }

    #[test]
    fn pushforward_substitutes_entries() {
        // Omega of C^inf(R)/(x^2), pushed along x -> t into C^inf(R)/(t^2)
        let src = RingPresentation::new("Dx", 1, vec![x(1, 1).pow(2)]).unwrap();
        let dst = RingPresentation::new("Dt", 1, vec![x(1, 1).pow(2)]).unwrap();
        let phi = RingMorphism::new(&src, &dst, vec![x(1, 1)]).unwrap();
        let pushed = module_pushforward(&cotangent_module(&src), &phi).unwrap();
        assert_eq!(pushed.num_gens(), 1);
        assert!(same_ring(pushed.ring(), &dst));
        assert!(poly_eq(&pushed.rows()[0][0], &(&SmoothExpr::from_int(1, 2) * &x(1, 1))));
        // ring mismatch is rejected
        let other = free_module(&RingPresentation::free("Z", 1), 1);
        assert_eq!(
            module_pushforward(&other, &phi).unwrap_err(),
            ModuleError::RingMismatch
        );
    }

    #[test]
    fn direct_sum_pads_blocks() {
        let ring = RingPresentation::new("D", 1, vec![x(1, 1).pow(2)]).unwrap();
        let omega = cotangent_module(&ring);
        let sum = direct_sum(&omega, &free_module(&ring, 2)).unwrap();
        assert_eq!(sum.num_gens(), 3);
        assert_eq!(sum.rows().len(), 1);
        let row = &sum.rows()[0];
        assert_eq!(row[0].rep().to_string(), "2*x1");
        assert!(row[1].rep().is_zero_literal());
        assert!(row[2].rep().is_zero_literal());
    }

    #[test]
    fn module_morphism_validates_shape() {
        let ring = RingPresentation::free("F", 1);
        let m1 = free_module(&ring, 1);
        let m2 = free_module(&ring, 2);
        let bad = ModuleMorphism::new(&m1, &m2, vec![vec![ring.one()]]);
        assert!(matches!(bad, Err(ModuleError::MatrixShape { .. })));
        let ok = ModuleMorphism::new(&m1, &m2, vec![vec![ring.one()], vec![ring.zero()]]).unwrap();
        assert_eq!(ok.status(), MorphismStatus::ProvedWellDefined);
    }

    #[test]
    fn identity_cotangent_morphism_is_the_identity_matrix() {
        let ring = RingPresentation::new("D", 1, vec![x(1, 1).pow(2)]).unwrap();
        let id = RingMorphism::identity(&ring);
        let omega_id = cotangent_morphism(&id).unwrap();
        assert_eq!(omega_id.matrix().len(), 1);
        assert!(poly_eq(&omega_id.matrix()[0][0], &SmoothExpr::one(1)));
        // the jacobian row (2x) maps to an existing target row, so the cheap
        // certificate proves well-definedness
        assert_eq!(omega_id.status(), MorphismStatus::ProvedWellDefined);
    }

    #[test]
    fn cotangent_morphism_is_the_gradient_of_the_images() {
        // x -> x1 * x2 gives the column (x2, x1)
        let c = RingPresentation::free("C", 1);
        let d = RingPresentation::free("D", 2);
        let phi = RingMorphism::new(&c, &d, vec![&x(2, 1) * &x(2, 2)]).unwrap();
        let omega = cotangent_morphism(&phi).unwrap();
        assert_eq!(omega.source().num_gens(), 1);
        assert_eq!(omega.target().num_gens(), 2);
        assert!(poly_eq(&omega.matrix()[0][0], &x(2, 2)));
        assert!(poly_eq(&omega.matrix()[1][0], &x(2, 1)));

        // x -> exp(x) gives the column (exp(x))
        let e = RingPresentation::free("E", 1);
        let psi = RingMorphism::new(
            &c,
            &e,
            vec![SmoothExpr::primitive(Primitive::Exp, &x(1, 1))],
        )
        .unwrap();
        let omega_psi = cotangent_morphism(&psi).unwrap();
        assert_eq!(
            *omega_psi.matrix()[0][0].rep(),
            SmoothExpr::primitive(Primitive::Exp, &x(1, 1))
        );
    }

    #[test]
    fn chain_rule_functoriality_on_a_concrete_pair() {
        // phi: x -> x^2, psi: x -> x + 1; the cotangent matrix of psi . phi
        // equals Omega_psi times psi applied to Omega_phi's entries
        let a = RingPresentation::free("A", 1);
        let b = RingPresentation::free("B", 1);
        let c = RingPresentation::free("C", 1);
        let phi = RingMorphism::new(&a, &b, vec![x(1, 1).pow(2)]).unwrap();
        let psi = RingMorphism::new(&b, &c, vec![&x(1, 1) + &SmoothExpr::one(1)]).unwrap();
        let composite = RingMorphism::compose(&psi, &phi).unwrap();
        let direct = cotangent_morphism(&composite).unwrap();
        let q = cotangent_morphism(&psi).unwrap();
        let p_pushed = psi.apply(&cotangent_morphism(&phi).unwrap().matrix()[0][0]).unwrap();
        let product = &q.matrix()[0][0] * &p_pushed;
        assert_eq!(
            direct.matrix()[0][0].equal_mod_ideal(&product).unwrap(),
            CosetVerdict::ProvedEqual
        );
    }

    #[test]
    fn module_morphism_compose_multiplies_matrices() {
        let ring = RingPresentation::free("F", 1);
        let m = free_module(&ring, 1);
        let two = ring.element(SmoothExpr::from_int(1, 2)).unwrap();
        let xg = ring.generator(1).unwrap();
        let f = ModuleMorphism::new(&m, &m, vec![vec![two]]).unwrap();
        let g = ModuleMorphism::new(&m, &m, vec![vec![xg]]).unwrap();
        let fg = ModuleMorphism::compose(&f, &g).unwrap();
        assert!(poly_eq(
            &fg.matrix()[0][0],
            &(&SmoothExpr::from_int(1, 2) * &x(1, 1))
        ));
        // mismatched modules refuse to compose
        let m2 = free_module(&ring, 2);
        let h = ModuleMorphism::identity(&m2);
        assert_eq!(
            ModuleMorphism::compose(&f, &h).unwrap_err(),
            ModuleError::ChainMismatch
        );
    }

    // the three worked pushout squares

    fn coproduct_sequence() -> (CotangentSequence, Arc<RingPresentation>) {
        let c = RingPresentation::trivial();
        let d = RingPresentation::free("D", 1);
        let e = RingPresentation::free("E", 1);
        let alpha = RingMorphism::new(&c, &d, vec![]).unwrap();
        let beta = RingMorphism::new(&c, &e, vec![]).unwrap();
        let data = pushout(&alpha, &beta).unwrap();
        let ring = data.ring.clone();
        (pushout_cotangent_sequence(&alpha, &beta, &data).unwrap(), ring)
    }

    fn tangential_sequence() -> (CotangentSequence, Arc<RingPresentation>) {
        let c = RingPresentation::free("C", 2);
        let d = RingPresentation::free("D", 1);
        let e = RingPresentation::free("E", 1);
        let alpha = RingMorphism::new(&c, &d, vec![x(1, 1), x(1, 1).pow(2)]).unwrap();
        let beta = RingMorphism::new(&c, &e, vec![x(1, 1), SmoothExpr::zero(1)]).unwrap();
        let data = pushout(&alpha, &beta).unwrap();
        let ring = data.ring.clone();
        (pushout_cotangent_sequence(&alpha, &beta, &data).unwrap(), ring)
    }

    fn transverse_sequence() -> (CotangentSequence, Arc<RingPresentation>) {
        let c = RingPresentation::free("C", 2);
        let d = RingPresentation::free("D", 1);
        let e = RingPresentation::free("E", 1);
        let alpha = RingMorphism::new(&c, &d, vec![x(1, 1), SmoothExpr::zero(1)]).unwrap();
        let beta = RingMorphism::new(&c, &e, vec![SmoothExpr::zero(1), x(1, 1)]).unwrap();
        let data = pushout(&alpha, &beta).unwrap();
        let ring = data.ring.clone();
        (pushout_cotangent_sequence(&alpha, &beta, &data).unwrap(), ring)
    }

    #[test]
    fn coproduct_sequence_shape() {
        let (seq, _) = coproduct_sequence();
        assert_eq!(seq.left().num_gens(), 0);
        assert_eq!(seq.middle().num_gens(), 2);
        assert_eq!(seq.right().num_gens(), 2);
        assert!(seq.right().is_free());
        // map2 is the identity matrix
        assert!(poly_eq(&seq.map2().matrix()[0][0], &SmoothExpr::one(2)));
        assert!(poly_eq(&seq.map2().matrix()[1][1], &SmoothExpr::one(2)));
        assert!(poly_eq(&seq.map2().matrix()[0][1], &SmoothExpr::zero(2)));
    }

    #[test]
    fn tangential_sequence_matrices() {
        let (seq, ring) = tangential_sequence();
        assert_eq!(
            ring.relations().iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            vec!["x1-x2", "x1^2"]
        );
        // map1: dz1 -> (dt, -ds), dz2 -> (2t dt, 0)
        let m1: Vec<Vec<String>> = seq
            .map1()
            .matrix()
            .iter()
            .map(|row| row.iter().map(|e| e.rep().to_string()).collect())
            .collect();
        assert_eq!(m1, vec![vec!["1", "2*x1"], vec!["-1", "0"]]);
        // Omega_F relations: dt - ds and 2t dt
        let rows: Vec<Vec<String>> = seq
            .right()
            .rows()
            .iter()
            .map(|row| row.iter().map(|e| e.rep().to_string()).collect())
            .collect();
        assert_eq!(rows, vec![vec!["1", "-1"], vec!["2*x1", "0"]]);
    }

    #[test]
    fn sequences_check_exact_at_real_points() {
        let box2 = [(-2.0, 2.0), (-2.0, 2.0)];
        for (seq, ring) in [coproduct_sequence(), tangential_sequence(), transverse_sequence()] {
            let points = spectrum::point_search(&ring, &box2, 9, 1e-9).unwrap();
            assert!(!points.is_empty());
            let report = sequence_check_pointwise(&seq, &points, 1e-8).unwrap();
            assert!(report.all_exact(), "sequence violated: {report:?}");
        }
    }

    #[test]
    fn sign_corrupted_map1_is_caught_at_the_tangential_point() {
        let (seq, ring) = tangential_sequence();
        let points =
            spectrum::point_search(&ring, &[(-2.0, 2.0), (-2.0, 2.0)], 9, 1e-9).unwrap();
        let report = sequence_check_pointwise(&seq.corrupt_map1_sign(), &points, 1e-8).unwrap();
        assert!(report.points.iter().any(|p| p.verdict == PointVerdict::Violated));
        // the composition residual is what breaks: sqrt(2) against tol 1e-8
        assert!(report.points[0].composition_residual > 1.0);
    }

    #[test]
    fn checker_rejects_foreign_points() {
        let (seq, _) = tangential_sequence();
        let free = RingPresentation::free("F", 2);
        let pt = spectrum::point_verify(&free, &[1.0, 0.5], 1e-9).unwrap();
        assert!(matches!(
            sequence_check_pointwise(&seq, &[pt], 1e-8),
            Err(ModuleError::NotAPoint { .. })
        ));
        let short = spectrum::point_verify(&RingPresentation::free("G", 1), &[0.0], 1e-9).unwrap();
        assert!(matches!(
            sequence_check_pointwise(&seq, &[short], 1e-8),
            Err(ModuleError::ArityMismatch { .. })
        ));
    }

    #[test]
    fn report_json_shape() {
        let (seq, ring) = transverse_sequence();
        let points = spectrum::point_search(&ring, &[(-2.0, 2.0), (-2.0, 2.0)], 5, 1e-9).unwrap();
        let report = sequence_check_pointwise(&seq, &points, 1e-8).unwrap();
        let v = report.json_value();
        assert_eq!(v["all_exact"], true);
        assert_eq!(v["points"][0]["verdict"], "exact");
        assert!(v["points"][0]["ranks"]["image"].is_number());
    }
}
