//! Scalar abstraction shared by evaluation and Weil-algebra arithmetic.
//!
//! The kernel runs the same code over floating-point scalars (for numerics)
//! and exact big rationals (for the symbolic paths).  The [`Scalar`] trait
//! captures exactly what those paths need: ring operations from `num-traits`,
//! an embedding of exact rational constants, and an *optional* evaluation of
//! the smooth primitives.  Floats support every primitive; rationals support
//! none, which is how exactness violations surface as errors instead of
//! silent rounding.

use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::expr::Primitive;

/// Ring of scalars the kernel can compute in.
///
/// Implemented for `f32`, `f64`, and [`BigRational`].
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
{
    /// Embeds an exact rational constant.
    fn from_rational(q: &BigRational) -> Self;

    /// Applies a smooth primitive, if this scalar type can.
    ///
    /// Returns `None` for exact scalar types: `sin(1)` has no exact rational
    /// value, and the kernel never substitutes an approximation on an exact
    /// code path.
    fn apply_primitive(prim: Primitive, x: Self) -> Option<Self>;

    /// Converts a float, if this scalar type admits approximate data.
    ///
    /// Quadrature nodes and weights are floating-point; exact scalars refuse
    /// them for the same reason they refuse primitives.
    fn from_f64_approx(x: f64) -> Option<Self>;

    /// Absolute value as an `f64`, when the scalar has a meaningful magnitude.
    ///
    /// Used only for diagnostics and tolerance checks.
    fn magnitude(&self) -> f64;
}

impl Scalar for f64 {
    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().expect("rational out of f64 range")
    }

    fn apply_primitive(prim: Primitive, x: Self) -> Option<Self> {
        Some(match prim {
            Primitive::Exp => x.exp(),
            Primitive::Sin => x.sin(),
            Primitive::Cos => x.cos(),
            Primitive::Atan => x.atan(),
            Primitive::Tanh => x.tanh(),
        })
    }

    fn from_f64_approx(x: f64) -> Option<Self> {
        Some(x)
    }

    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Scalar for f32 {
    fn from_rational(q: &BigRational) -> Self {
        q.to_f64().expect("rational out of f64 range") as f32
    }

    fn apply_primitive(prim: Primitive, x: Self) -> Option<Self> {
        Some(match prim {
            Primitive::Exp => x.exp(),
            Primitive::Sin => x.sin(),
            Primitive::Cos => x.cos(),
            Primitive::Atan => x.atan(),
            Primitive::Tanh => x.tanh(),
        })
    }

    fn from_f64_approx(x: f64) -> Option<Self> {
        Some(x as f32)
    }

    fn magnitude(&self) -> f64 {
        self.abs() as f64
    }
}

impl Scalar for BigRational {
    fn from_rational(q: &BigRational) -> Self {
        q.clone()
    }

    fn apply_primitive(_prim: Primitive, _x: Self) -> Option<Self> {
        None
    }

    fn from_f64_approx(_x: f64) -> Option<Self> {
        None
    }

    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
}
