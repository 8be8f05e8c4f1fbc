//! Finitely presented smooth rings, their morphisms, and pushouts.
//!
//! A [`RingPresentation`] denotes `C^inf(R^n) / I` where `I` is the ideal of
//! smooth functions generated by finitely many relation expressions.
//! Elements are representative expressions; morphisms are generator images.
//! Because ideal membership for smooth functions is undecidable in general,
//! the coset oracle [`RingElement::equal_mod_ideal`] returns a three-valued
//! [`CosetVerdict`]: `ProvedEqual` is always backed by an exact certificate
//! (structural identity, a zero polynomial normal form, or an explicit
//! division chain), `Falsified` by a concrete witness (a real point with a
//! visible difference, or a nonzero image in a Weil model at an isolated
//! zero), and everything else is an honest `Unknown`.
//!
//! Pushouts glue two morphisms with common source: generators are the
//! disjoint union of the cofactors' generators, relations are both relation
//! blocks plus one glue relation per source generator.  [`to_weil`] turns a
//! presentation at a vanishing point into a Weil algebra by recentring the
//! relations and truncating; [`to_weil_stabilized`] raises the truncation
//! order until the dimension stops changing.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde_json::{json, Value};
use std::sync::Arc;

use crate::expr::{PolyNormalForm, SmoothExpr};
use crate::spectrum;
use crate::weil::{WeilAlgebra, WeilElement, WeilError};

/// Box half-width and per-axis node count used by the coset oracle's
/// internal point searches; the nodes land on the integers `-4..4`.
const COSET_BOX_HALF_WIDTH: f64 = 4.0;
const COSET_GRID: usize = 9;
/// Step cap for the multivariate division certificate.
const MAX_DIVISION_STEPS: usize = 10_000;
/// Relative threshold for numeric falsification at a found point.
const NUMERIC_FALSIFY_TOL: f64 = 1e-6;
/// Tolerance for snapping an approximately vanishing constant term when
/// recentring relations at a floating-point center.
const CENTER_SNAP_TOL: f64 = 1e-9;
/// Largest truncation order tried by [`to_weil_stabilized`].
const MAX_STABILIZE_ORDER: u32 = 8;
/// Generator-count cap for the oracle's Weil-model falsifier.
const WEIL_ROUTE_MAX_GENS: usize = 3;
/// Grid cap for exact falsification of polynomials in a free ring.
const FREE_FALSIFY_GRID_CAP: usize = 100_000;

/// Errors from presentation, morphism, and model construction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RingError {
    #[error("expected arity {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("elements belong to different rings")]
    RingMismatch,
    #[error("morphisms do not compose: source and target differ")]
    ChainMismatch,
    #[error("pushout requires morphisms with a common source")]
    SourceMismatch,
    #[error("relation {relation} is not sent into the target ideal")]
    NotAMorphism {
        relation: usize,
        falsification: Falsification,
    },
    #[error("center is not a zero of the relations: residual {residual:e}")]
    NotAPoint { residual: f64 },
    #[error("representative involves a primitive and cannot be reduced exactly")]
    UnsupportedRepresentative,
    #[error("dimension did not stabilize below truncation order {max_order}")]
    StabilizationFailed { max_order: u32 },
    #[error(transparent)]
    Weil(#[from] WeilError),
}

/// A presentation `C^inf(R^n) / (relations)`.
///
/// Equality of presentations is structural (same generator count, same
/// relation trees, in order); the label is display data.
#[derive(Debug)]
pub struct RingPresentation {
    label: String,
    num_gens: usize,
    relations: Vec<SmoothExpr>,
}

impl PartialEq for RingPresentation {
    fn eq(&self, other: &Self) -> bool {
        self.num_gens == other.num_gens && self.relations == other.relations
    }
}

/// Arc identity or structural equality; used everywhere two handles must
/// denote the same ring.
pub(crate) fn same_ring(a: &Arc<RingPresentation>, b: &Arc<RingPresentation>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

impl RingPresentation {
    /// A presentation with the given generator count and relations.
    pub fn new(
        label: impl Into<String>,
        num_gens: usize,
        relations: Vec<SmoothExpr>,
    ) -> Result<Arc<Self>, RingError> {
        for r in &relations {
            if r.arity() != num_gens {
                return Err(RingError::ArityMismatch {
                    expected: num_gens,
                    got: r.arity(),
                });
            }
        }
        Ok(Arc::new(RingPresentation {
            label: label.into(),
            num_gens,
            relations,
        }))
    }

    /// The free smooth ring on `num_gens` generators.
    pub fn free(label: impl Into<String>, num_gens: usize) -> Arc<Self> {
        Self::new(label, num_gens, Vec::new()).expect("no relations to check")
    }

    /// The ring of scalars: zero generators, no relations.
    pub fn trivial() -> Arc<Self> {
        Self::free("R", 0)
    }

    /// Display label.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// The same presentation under a different label.
    pub fn with_label(self: &Arc<Self>, label: impl Into<String>) -> Arc<Self> {
        Self::new(label, self.num_gens, self.relations.clone()).expect("relations already checked")
    }

    /// Number of generators `n`.
    pub fn num_gens(&self) -> usize {
        self.num_gens
    }

    /// Relation expressions generating the ideal.
    pub fn relations(&self) -> &[SmoothExpr] {
        &self.relations
    }

    /// Polynomial normal forms of all relations, if every relation is
    /// polynomial.
    pub fn relations_poly(&self) -> Option<Vec<PolyNormalForm>> {
        self.relations.iter().map(SmoothExpr::poly_normal_form).collect()
    }

    /// Wraps a representative expression as an element.
    pub fn element(self: &Arc<Self>, rep: SmoothExpr) -> Result<RingElement, RingError> {
        if rep.arity() != self.num_gens {
            return Err(RingError::ArityMismatch {
                expected: self.num_gens,
                got: rep.arity(),
            });
        }
        Ok(RingElement {
            ring: self.clone(),
            rep,
        })
    }

    /// The image of the `index`-th generator (1-based).
    pub fn generator(self: &Arc<Self>, index: usize) -> Result<RingElement, RingError> {
        let rep = SmoothExpr::var(self.num_gens, index).map_err(|_| RingError::ArityMismatch {
            expected: self.num_gens,
            got: index,
        })?;
        self.element(rep)
    }

    /// The zero element.
    pub fn zero(self: &Arc<Self>) -> RingElement {
        RingElement {
            ring: self.clone(),
            rep: SmoothExpr::zero(self.num_gens),
        }
    }

    /// The unit element.
    pub fn one(self: &Arc<Self>) -> RingElement {
        RingElement {
            ring: self.clone(),
            rep: SmoothExpr::one(self.num_gens),
        }
    }

    /// The structure operation: applies a smooth expression of arity `k` to
    /// `k` elements by substituting their representatives.
    pub fn apply(
        self: &Arc<Self>,
        f: &SmoothExpr,
        args: &[RingElement],
    ) -> Result<RingElement, RingError> {
        for a in args {
            if !same_ring(&a.ring, self) {
                return Err(RingError::RingMismatch);
            }
        }
        if f.arity() != args.len() {
            return Err(RingError::ArityMismatch {
                expected: f.arity(),
                got: args.len(),
            });
        }
        let reps: Vec<SmoothExpr> = args.iter().map(|a| a.rep.clone()).collect();
        let rep = f
            .compose(&reps, self.num_gens)
            .expect("arities validated above");
        Ok(RingElement {
            ring: self.clone(),
            rep,
        })
    }

    /// Serialization used by session files and reports.
    pub fn json_value(&self) -> Value {
        json!({
            "label": self.label,
            "n": self.num_gens,
            "relations": self.relations.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
        })
    }
}

/// An element of a presented ring: a representative expression modulo the
/// relation ideal.
#[derive(Debug, Clone)]
pub struct RingElement {
    ring: Arc<RingPresentation>,
    rep: SmoothExpr,
}

/// Outcome of the coset oracle.
#[derive(Debug, Clone, PartialEq)]
pub enum CosetVerdict {
    /// The difference is provably in the ideal (exact certificate).
    ProvedEqual,
    /// The difference is provably not in the ideal (concrete witness).
    Falsified(Falsification),
    /// Neither a certificate nor a witness was found.
    Unknown,
}

/// Witness data for a negative coset verdict.
#[derive(Debug, Clone, PartialEq)]
pub enum Falsification {
    /// The representatives differ visibly at a common zero of the relations.
    AtPoint { point: Vec<f64>, difference: f64 },
    /// The difference has a nonzero image in the Weil model at an isolated
    /// rational zero of the relations.
    InWeilModel { center: Vec<f64> },
}

impl RingElement {
    /// The ambient ring.
    pub fn ring(&self) -> &Arc<RingPresentation> {
        &self.ring
    }

    /// The representative expression.
    pub fn rep(&self) -> &SmoothExpr {
        &self.rep
    }

    /// Decides, as far as possible, whether two elements represent the same
    /// coset.  See the module documentation for the verdict semantics.
    pub fn equal_mod_ideal(&self, other: &RingElement) -> Result<CosetVerdict, RingError> {
        if !same_ring(&self.ring, &other.ring) {
            return Err(RingError::RingMismatch);
        }
        let ring = &self.ring;

        // exact certificate 1: identical representatives
        if self.rep == other.rep {
            return Ok(CosetVerdict::ProvedEqual);
        }
        let diff = &self.rep - &other.rep;

        // exact certificate 2: the difference is literally a relation (up to
        // sign), as happens for the glue relations of a pushout
        for r in ring.relations() {
            if diff == *r || diff == -r {
                return Ok(CosetVerdict::ProvedEqual);
            }
        }

        let diff_poly = diff.poly_normal_form();
        // exact certificate 3: zero polynomial normal form
        if let Some(p) = &diff_poly {
            if p.is_zero() {
                return Ok(CosetVerdict::ProvedEqual);
            }
        }
        let rels_poly = ring.relations_poly();

        // exact certificate 4: division by the relations reaches zero
        if let (Some(p), Some(rels)) = (&diff_poly, &rels_poly) {
            if !rels.is_empty() && p.reduces_to_zero_mod(rels, MAX_DIVISION_STEPS) {
                return Ok(CosetVerdict::ProvedEqual);
            }
        }

        // exact falsifier for free rings: a nonzero polynomial difference is
        // nonzero somewhere on a large enough integer grid
        if ring.relations.is_empty() {
            if let Some(p) = &diff_poly {
                if let Some((point, difference)) = falsify_nonzero_poly(p) {
                    return Ok(CosetVerdict::Falsified(Falsification::AtPoint {
                        point,
                        difference,
                    }));
                }
            }
        }

        // witness search: real points of the presentation
        let bounds = vec![(-COSET_BOX_HALF_WIDTH, COSET_BOX_HALF_WIDTH); ring.num_gens];
        let points = spectrum::point_search(ring, &bounds, COSET_GRID, spectrum::DEFAULT_POINT_TOL)
            .expect("internally consistent search parameters");

        // Weil-model falsifier at an isolated exact zero
        if let (Some(p), Some(rels)) = (&diff_poly, &rels_poly) {
            if points.len() == 1 && ring.num_gens <= WEIL_ROUTE_MAX_GENS {
                if let Some(center) = snap_to_exact_zero(points[0].coords(), rels) {
                    if let Ok((model, _)) = to_weil_exact(ring, center.clone(), None) {
                        let image = model
                            .algebra
                            .reduce_poly::<BigRational>(&p.shift(&center))
                            .expect("arity preserved by shift");
                        if !image.is_zero() {
                            let center_f64: Vec<f64> = center
                                .iter()
                                .map(|c| c.to_f64().expect("snapped center is small"))
                                .collect();
                            return Ok(CosetVerdict::Falsified(Falsification::InWeilModel {
                                center: center_f64,
                            }));
                        }
                    }
                }
            }
        }

        // numeric falsifier at the found points
        for pt in &points {
            let a: f64 = self
                .rep
                .evaluate(pt.coords())
                .expect("f64 evaluation is total");
            let b: f64 = other
                .rep
                .evaluate(pt.coords())
                .expect("f64 evaluation is total");
            let difference = a - b;
            if difference.abs() > NUMERIC_FALSIFY_TOL * (1.0 + a.abs() + b.abs()) {
                return Ok(CosetVerdict::Falsified(Falsification::AtPoint {
                    point: pt.coords().to_vec(),
                    difference,
                }));
            }
        }

        Ok(CosetVerdict::Unknown)
    }
}

impl std::ops::Add for &RingElement {
    type Output = RingElement;
    fn add(self, rhs: &RingElement) -> RingElement {
        assert!(same_ring(&self.ring, &rhs.ring), "ring mismatch in sum");
        RingElement {
            ring: self.ring.clone(),
            rep: &self.rep + &rhs.rep,
        }
    }
}

impl std::ops::Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, rhs: &RingElement) -> RingElement {
        assert!(same_ring(&self.ring, &rhs.ring), "ring mismatch in difference");
        RingElement {
            ring: self.ring.clone(),
            rep: &self.rep - &rhs.rep,
        }
    }
}

impl std::ops::Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, rhs: &RingElement) -> RingElement {
        assert!(same_ring(&self.ring, &rhs.ring), "ring mismatch in product");
        RingElement {
            ring: self.ring.clone(),
            rep: &self.rep * &rhs.rep,
        }
    }
}

impl std::ops::Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        RingElement {
            ring: self.ring.clone(),
            rep: -&self.rep,
        }
    }
}

/// A nonzero polynomial is nonzero at some node of the integer grid
/// `{0..deg}^n`; returns the first such node with the exact difference value.
fn falsify_nonzero_poly(p: &PolyNormalForm) -> Option<(Vec<f64>, f64)> {
    let n = p.arity();
    let deg = p.total_degree()? as usize;
    let width = deg + 1;
    match width.checked_pow(n as u32) {
        Some(total) if total <= FREE_FALSIFY_GRID_CAP => {}
        _ => return None,
    }
    let mut idx = vec![0usize; n];
    loop {
        let point: Vec<BigRational> = idx
            .iter()
            .map(|&i| BigRational::from_integer(BigInt::from(i as i64)))
            .collect();
        let value = p.eval(&point).expect("arity matches");
        if !value.is_zero() {
            let coords: Vec<f64> = idx.iter().map(|&i| i as f64).collect();
            return Some((coords, value.to_f64().unwrap_or(f64::INFINITY)));
        }
        // odometer increment
        let mut k = 0;
        loop {
            if k == n {
                return None;
            }
            idx[k] += 1;
            if idx[k] < width {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Smallest-denominator rational within `1e-6` of each coordinate, provided
/// the relations vanish exactly there.
fn snap_to_exact_zero(coords: &[f64], rels: &[PolyNormalForm]) -> Option<Vec<BigRational>> {
    const MAX_DENOMINATOR: i64 = 64;
    const SNAP_TOL: f64 = 1e-6;
    let mut out = Vec::with_capacity(coords.len());
    for &x in coords {
        let mut snapped = None;
        for den in 1..=MAX_DENOMINATOR {
            let num = (x * den as f64).round();
            if num.abs() > 1e15 {
                return None;
            }
            if (x - num / den as f64).abs() <= SNAP_TOL {
                snapped = Some(BigRational::new(
                    BigInt::from(num as i64),
                    BigInt::from(den),
                ));
                break;
            }
        }
        out.push(snapped?);
    }
    for r in rels {
        let v: BigRational = r.eval(&out).expect("arity matches");
        if !v.is_zero() {
            return None;
        }
    }
    Some(out)
}

// ---------------------------------------------------------------------------
// morphisms
// ---------------------------------------------------------------------------

/// Verification status of a morphism (or of data derived from morphisms).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MorphismStatus {
    /// Every source relation maps into the target ideal with an exact
    /// certificate.
    ProvedWellDefined,
    /// No violation was found, but at least one membership is unproven.
    NumericallyConsistent,
    /// A violation witness exists.
    Falsified,
}

impl MorphismStatus {
    /// Stable machine-readable name.
    pub fn as_str(self) -> &'static str {
        match self {
            MorphismStatus::ProvedWellDefined => "proved_well_defined",
            MorphismStatus::NumericallyConsistent => "numerically_consistent",
            MorphismStatus::Falsified => "falsified",
        }
    }

    fn rank(self) -> u8 {
        match self {
            MorphismStatus::ProvedWellDefined => 2,
            MorphismStatus::NumericallyConsistent => 1,
            MorphismStatus::Falsified => 0,
        }
    }

    /// The weaker of two statuses.
    pub fn weaker(self, other: MorphismStatus) -> MorphismStatus {
        if self.rank() <= other.rank() {
            self
        } else {
            other
        }
    }
}

/// A morphism of presented rings, given by generator images.
#[derive(Debug, Clone)]
pub struct RingMorphism {
    source: Arc<RingPresentation>,
    target: Arc<RingPresentation>,
    images: Vec<RingElement>,
    status: MorphismStatus,
}

impl RingMorphism {
    /// Builds and verifies a morphism from generator images.
    ///
    /// Each source relation, with generators substituted by their images,
    /// must land in the target ideal.  A falsified membership aborts with
    /// [`RingError::NotAMorphism`]; unproven memberships downgrade the
    /// status to `NumericallyConsistent`.
    pub fn new(
        source: &Arc<RingPresentation>,
        target: &Arc<RingPresentation>,
        images: Vec<SmoothExpr>,
    ) -> Result<Self, RingError> {
        if images.len() != source.num_gens {
            return Err(RingError::ArityMismatch {
                expected: source.num_gens,
                got: images.len(),
            });
        }
        let mut image_elems = Vec::with_capacity(images.len());
        for im in images {
            image_elems.push(target.element(im)?);
        }
        let mut status = MorphismStatus::ProvedWellDefined;
        let zero = target.zero();
        for (relation, rel) in source.relations.iter().enumerate() {
            let mapped = target.apply(rel, &image_elems)?;
            match mapped.equal_mod_ideal(&zero)? {
                CosetVerdict::ProvedEqual => {}
                CosetVerdict::Unknown => {
                    status = status.weaker(MorphismStatus::NumericallyConsistent);
                }
                CosetVerdict::Falsified(falsification) => {
                    return Err(RingError::NotAMorphism {
                        relation,
                        falsification,
                    });
                }
            }
        }
        Ok(RingMorphism {
            source: source.clone(),
            target: target.clone(),
            images: image_elems,
            status,
        })
    }

    /// Constructs a morphism whose verification happened elsewhere (used by
    /// point evaluation, where vanishing is certified with a tolerance).
    pub(crate) fn raw(
        source: Arc<RingPresentation>,
        target: Arc<RingPresentation>,
        images: Vec<RingElement>,
        status: MorphismStatus,
    ) -> Self {
        RingMorphism {
            source,
            target,
            images,
            status,
        }
    }

    /// The identity morphism.
    pub fn identity(ring: &Arc<RingPresentation>) -> Self {
        let images = (1..=ring.num_gens)
            .map(|i| ring.generator(i).expect("index in range"))
            .collect();
        RingMorphism {
            source: ring.clone(),
            target: ring.clone(),
            images,
            status: MorphismStatus::ProvedWellDefined,
        }
    }

    /// Source presentation.
    pub fn source(&self) -> &Arc<RingPresentation> {
        &self.source
    }

    /// Target presentation.
    pub fn target(&self) -> &Arc<RingPresentation> {
        &self.target
    }

    /// Generator images in the target.
    pub fn images(&self) -> &[RingElement] {
        &self.images
    }

    /// Verification status.
    pub fn status(&self) -> MorphismStatus {
        self.status
    }

    /// Applies the morphism to an element by substituting representatives.
    pub fn apply(&self, elem: &RingElement) -> Result<RingElement, RingError> {
        if !same_ring(&elem.ring, &self.source) {
            return Err(RingError::RingMismatch);
        }
        self.target.apply(&elem.rep, &self.images)
    }

    /// Composite `later . earlier`; the status is the weaker of the two.
    pub fn compose(later: &RingMorphism, earlier: &RingMorphism) -> Result<RingMorphism, RingError> {
        if !same_ring(&later.source, &earlier.target) {
            return Err(RingError::ChainMismatch);
        }
        let mut images = Vec::with_capacity(earlier.images.len());
        for im in &earlier.images {
            // rebind to the later morphism's source handle before applying
            let elem = RingElement {
                ring: later.source.clone(),
                rep: im.rep.clone(),
            };
            images.push(later.apply(&elem)?);
        }
        Ok(RingMorphism {
            source: earlier.source.clone(),
            target: later.target.clone(),
            images,
            status: later.status.weaker(earlier.status),
        })
    }

    /// Serialization used by session files and reports.
    pub fn json_value(&self) -> Value {
        json!({
            "source": self.source.label(),
            "target": self.target.label(),
            "images": self.images.iter().map(|i| i.rep.to_string()).collect::<Vec<_>>(),
            "status": self.status.as_str(),
        })
    }
}

// ---------------------------------------------------------------------------
// pushouts
// ---------------------------------------------------------------------------

/// A pushout square's derived data: the glued ring and the two structure
/// morphisms from the cofactors.
#[derive(Debug, Clone)]
pub struct PushoutData {
    /// The glued ring `F`.
    pub ring: Arc<RingPresentation>,
    /// `D -> F`, sending the `D` generators to the first block.
    pub left: RingMorphism,
    /// `E -> F`, sending the `E` generators to the second block.
    pub right: RingMorphism,
}

/// Glues `alpha: C -> D` and `beta: C -> E` along their common source.
///
/// The result has `n_D + n_E` generators; its relations are the `D`
/// relations (first block), the `E` relations (shifted into the second
/// block), and one glue relation `alpha(c_j) - beta(c_j)` per generator of
/// `C`.
pub fn pushout(alpha: &RingMorphism, beta: &RingMorphism) -> Result<PushoutData, RingError> {
    if !same_ring(&alpha.source, &beta.source) {
        return Err(RingError::SourceMismatch);
    }
    let d = &alpha.target;
    let e = &beta.target;
    let n_d = d.num_gens;
    let n_e = e.num_gens;
    let n_f = n_d + n_e;

    let d_vars: Vec<SmoothExpr> = (1..=n_d)
        .map(|i| SmoothExpr::var(n_f, i).expect("index in range"))
        .collect();
    let e_vars: Vec<SmoothExpr> = (n_d + 1..=n_f)
        .map(|i| SmoothExpr::var(n_f, i).expect("index in range"))
        .collect();

    let embed_d = |expr: &SmoothExpr| expr.compose(&d_vars, n_f).expect("arity matches");
    let embed_e = |expr: &SmoothExpr| expr.compose(&e_vars, n_f).expect("arity matches");

    let mut relations = Vec::new();
    for r in &d.relations {
        relations.push(embed_d(r));
    }
    for r in &e.relations {
        relations.push(embed_e(r));
    }
    for j in 0..alpha.source.num_gens {
        let a = embed_d(&alpha.images[j].rep);
        let b = embed_e(&beta.images[j].rep);
        relations.push(&a - &b);
    }

    let label = format!("pushout({},{};{})", d.label, e.label, alpha.source.label);
    let f = RingPresentation::new(label, n_f, relations)?;
    let left = RingMorphism::new(d, &f, d_vars)?;
    let right = RingMorphism::new(e, &f, e_vars)?;
    Ok(PushoutData { ring: f, left, right })
}

// ---------------------------------------------------------------------------
// Weil models of a presentation at a point
// ---------------------------------------------------------------------------

/// A Weil algebra approximating a presentation at a vanishing point,
/// together with the exact recentring data.
#[derive(Debug)]
pub struct WeilModel {
    algebra: Arc<WeilAlgebra>,
    center: Vec<BigRational>,
    ring: Arc<RingPresentation>,
}

impl WeilModel {
    /// The underlying Weil algebra.
    pub fn algebra(&self) -> &Arc<WeilAlgebra> {
        &self.algebra
    }

    /// The exact center the relations were recentred at.
    pub fn center(&self) -> &[BigRational] {
        &self.center
    }

    /// The center as floating-point coordinates.
    pub fn center_f64(&self) -> Vec<f64> {
        self.center
            .iter()
            .map(|c| c.to_f64().expect("center in f64 range"))
            .collect()
    }

    /// The modelled presentation.
    pub fn ring(&self) -> &Arc<RingPresentation> {
        &self.ring
    }

    /// Reduces an element to its image in the model.
    ///
    /// The representative must be polynomial; reduction recentres it at the
    /// model's center exactly and projects onto the algebra basis.
    pub fn reduce(&self, elem: &RingElement) -> Result<WeilElement<BigRational>, RingError> {
        if !same_ring(&elem.ring, &self.ring) {
            return Err(RingError::RingMismatch);
        }
        let p = elem
            .rep
            .poly_normal_form()
            .ok_or(RingError::UnsupportedRepresentative)?;
        Ok(self.algebra.reduce_poly(&p.shift(&self.center))?)
    }
}

/// Recentred polynomial relations for a model at `center`.
///
/// With `snap_tol` set, constant terms within the tolerance are dropped
/// (the center came from a numeric search); otherwise constant terms must
/// vanish exactly.
fn shifted_relations(
    ring: &Arc<RingPresentation>,
    center: &[BigRational],
    snap_tol: Option<f64>,
) -> Result<Vec<PolyNormalForm>, RingError> {
    let mut out = Vec::with_capacity(ring.relations.len());
    for r in &ring.relations {
        let p = r
            .poly_normal_form()
            .ok_or(RingError::UnsupportedRepresentative)?;
        let mut shifted = p.shift(center);
        let ct = shifted.constant_term();
        if !ct.is_zero() {
            let magnitude = ct.abs().to_f64().unwrap_or(f64::INFINITY);
            match snap_tol {
                Some(tol) if magnitude <= tol => {
                    shifted = &shifted - &PolyNormalForm::constant(ring.num_gens, ct);
                }
                _ => return Err(RingError::NotAPoint { residual: magnitude }),
            }
        }
        out.push(shifted);
    }
    Ok(out)
}

fn model_at_order(
    ring: &Arc<RingPresentation>,
    center: &[BigRational],
    shifted: &[PolyNormalForm],
    order: u32,
) -> Result<WeilModel, RingError> {
    let algebra = WeilAlgebra::new(ring.num_gens, order, shifted)?;
    Ok(WeilModel {
        algebra,
        center: center.to_vec(),
        ring: ring.clone(),
    })
}

/// The Weil model of `ring` at `center` with the given truncation order.
///
/// The center must be a common zero of the relations: each relation is
/// recentred exactly (floats are read as exact binary rationals) and its
/// constant term must vanish, up to a `1e-9` snap for numerically found
/// centers.  All relations must be polynomial.
pub fn to_weil(
    ring: &Arc<RingPresentation>,
    center: &[f64],
    order: u32,
) -> Result<WeilModel, RingError> {
    let exact = rationalize_center(ring, center)?;
    let shifted = shifted_relations(ring, &exact, Some(CENTER_SNAP_TOL))?;
    model_at_order(ring, &exact, &shifted, order)
}

/// Like [`to_weil`], but raises the truncation order until the dimension
/// stops growing, returning the stabilized model and its order.
///
/// Stabilization at consecutive orders means the degree filtration of the
/// local algebra has terminated, so the result is the full local model; a
/// presentation with positive-dimensional zero set near the center never
/// stabilizes and is reported as such.
pub fn to_weil_stabilized(
    ring: &Arc<RingPresentation>,
    center: &[f64],
) -> Result<(WeilModel, u32), RingError> {
    let exact = rationalize_center(ring, center)?;
    let shifted = shifted_relations(ring, &exact, Some(CENTER_SNAP_TOL))?;
    stabilized_from_shifted(ring, exact, &shifted)
}

/// Exact-center variant used by the coset oracle (no snapping: the center is
/// already verified to be an exact zero).
fn to_weil_exact(
    ring: &Arc<RingPresentation>,
    center: Vec<BigRational>,
    snap_tol: Option<f64>,
) -> Result<(WeilModel, u32), RingError> {
    let shifted = shifted_relations(ring, &center, snap_tol)?;
    stabilized_from_shifted(ring, center, &shifted)
}

fn stabilized_from_shifted(
    ring: &Arc<RingPresentation>,
    center: Vec<BigRational>,
    shifted: &[PolyNormalForm],
) -> Result<(WeilModel, u32), RingError> {
    let mut prev_dim = None;
    for order in 1..=MAX_STABILIZE_ORDER {
        let model = model_at_order(ring, &center, shifted, order)?;
        let dim = model.algebra.dimension();
        if prev_dim == Some(dim) {
            return Ok((model, order));
        }
        prev_dim = Some(dim);
    }
    Err(RingError::StabilizationFailed {
        max_order: MAX_STABILIZE_ORDER,
    })
}

fn rationalize_center(
    ring: &Arc<RingPresentation>,
    center: &[f64],
) -> Result<Vec<BigRational>, RingError> {
    if center.len() != ring.num_gens {
        return Err(RingError::ArityMismatch {
            expected: ring.num_gens,
            got: center.len(),
        });
    }
    center
        .iter()
        .map(|&c| BigRational::from_float(c).ok_or(RingError::NotAPoint { residual: f64::INFINITY }))
        .collect()
}
