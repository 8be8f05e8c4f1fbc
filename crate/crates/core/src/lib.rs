//! A computer-algebra kernel for finitely presented smooth rings.
//!
//! The central objects are rings of the form `C^inf(R^n)/I` where `I` is
//! generated by finitely many smooth expressions, together with three kinds of
//! derived data:
//!
//! * **Weil algebras** ([`weil`]): finite-dimensional local quotients such as
//!   the dual numbers, carrying truncated-Taylor (jet) arithmetic.  Every
//!   smooth expression acts on them, which is what makes them useful probes.
//! * **Real points** ([`spectrum`]): algebra maps to the reals, computed as
//!   common zeros of the defining relations.
//! * **Cotangent modules** ([`cotangent`]): finitely presented modules of
//!   differentials, presented by Jacobian rows, with pushforwards and an
//!   exactness checker for the sequence attached to a pushout square.
//!
//! Expressions live in [`expr`]; presentations, morphisms, pushouts, and the
//! coset-equality oracle live in [`ring`].
//!
//! Arithmetic is generic over a [`scalar::Scalar`], so the same evaluation and
//! jet code runs with `f64` (numerics) and with exact big rationals (where the
//! algebra is decidable).  The crate root fixes the concrete choices used by
//! the numeric subsystems.

pub mod cotangent;
pub mod expr;
pub mod random;
pub mod ring;
pub mod scalar;
pub mod spectrum;
pub mod weil;

/// Scalar type used by all floating-point numerics (point search, pointwise
/// rank checks, quadrature).
pub type Real = f64;

/// Exact rational scalar used wherever the kernel computes symbolically
/// (polynomial normal forms, Weil algebra structure constants, Taylor
/// coefficients of polynomial expressions).
pub type Rational = num_rational::BigRational;

/// Weil-algebra element with floating-point coordinates.
pub type RealWeilElement = weil::WeilElement<Real>;

/// Weil-algebra element with exact rational coordinates.
pub type ExactWeilElement = weil::WeilElement<Rational>;

pub use cotangent::{CotangentSequence, ExactSeqReport, FPModule, ModuleMorphism};
pub use expr::{ParseError, PolyNormalForm, Primitive, SmoothExpr};
pub use ring::{CosetVerdict, RingElement, RingMorphism, RingPresentation};
pub use spectrum::RPoint;
pub use weil::{WeilAlgebra, WeilElement};
