//! Scalar traits the rest of the crate is generic over.
//!
//! [`Scalar`] only asks for ring arithmetic, so every deterministic tensor
//! product works over `f32`, `f64`, `Complex<f64>` or exact rationals.
//! [`Real`] adds what the calculus and distribution code needs: ordering,
//! transcendental functions and a standard normal draw.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, Num, NumAssign, ToPrimitive};
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

pub trait Scalar: Copy + Debug + PartialEq + Num + NumAssign + Sum + Send + Sync + 'static {}

impl<T> Scalar for T where T: Copy + Debug + PartialEq + Num + NumAssign + Sum + Send + Sync + 'static
{}

/// floating point: f32 or f64
pub trait Real:
    Scalar + Float + FloatConst + FromPrimitive + ToPrimitive + Display + LowerExp + Default
{
    /// Draw one standard normal variate.
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self;

    /// Convert an `f64` literal; lossy for `f32`.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal representable")
    }

    #[inline]
    fn from_usize_lossy(v: usize) -> Self {
        Self::from_usize(v).expect("usize representable")
    }
}

impl Real for f32 {
    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}

impl Real for f64 {
    #[inline]
    fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> Self {
        StandardNormal.sample(rng)
    }
}
