//! Scalar abstractions shared by the numerical modules.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, Num, ToPrimitive};

/// Floating point scalar used by the geometric and spectral code: f32 or f64.
///
/// The associated tolerances scale the solver's stopping rules to the
/// precision of the type.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + LowerExp + Sum + Send + Sync + 'static
{
    /// Relative width at which eigenvalue bisection stops.
    const BISECTION_REL_TOL: f64;
    /// Absolute floor on the bisection width, for eigenvalues near zero.
    const BISECTION_ABS_TOL: f64;
    /// Target for `||K u - lambda M u|| / ||u||` after inverse iteration.
    const RESIDUAL_TOL: f64;

    /// Lossless for the constants used in this crate.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable in scalar type")
    }

    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("index representable in scalar type")
    }
}

impl Real for f32 {
    const BISECTION_REL_TOL: f64 = 1e-6;
    const BISECTION_ABS_TOL: f64 = 1e-30;
    const RESIDUAL_TOL: f64 = 1e-3;
}

impl Real for f64 {
    const BISECTION_REL_TOL: f64 = 1e-12;
    const BISECTION_ABS_TOL: f64 = 1e-300;
    const RESIDUAL_TOL: f64 = 1e-8;
}

/// Field scalar for formula evaluation that may be exact (rationals) or
/// floating point.
pub trait FieldScalar: Num + Clone + PartialOrd + Debug {
    fn from_i64(n: i64) -> Self;
}

impl FieldScalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }
}

impl FieldScalar for f32 {
    fn from_i64(n: i64) -> Self {
        n as f32
    }
}

impl<I> FieldScalar for num_rational::Ratio<I>
where
    I: num_integer::Integer + Clone + Debug + FromPrimitive,
{
    fn from_i64(n: i64) -> Self {
        num_rational::Ratio::from_integer(I::from_i64(n).expect("integer fits"))
    }
}
