//! Floating-point abstraction for the analysis side.
//!
//! Everything p-adic in this crate is exact; floating point enters only
//! where character sums and exponential weights are accumulated. Those
//! accumulations are generic over [`Real`] so the whole analysis layer
//! works at `f32` or `f64` (the crate-root aliases fix `f64`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;

pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    /// Unit roundoff of the format (half an ulp of 1.0).
    fn unit_roundoff() -> Self;

    fn from_f64_lossy(v: f64) -> Self {
        Self::from_f64(v).expect("f64 conversion")
    }

    /// Nearest representable value of an exact rational.
    fn from_big_rational(q: &BigRational) -> Self {
        Self::from_f64_lossy(big_rational_to_f64(q))
    }

    fn from_bigint(v: &BigInt) -> Self {
        Self::from_f64_lossy(v.to_f64().unwrap_or(f64::INFINITY))
    }
}

impl Real for f64 {
    fn unit_roundoff() -> Self {
        0.5 * f64::EPSILON
    }
}

impl Real for f32 {
    fn unit_roundoff() -> Self {
        0.5 * f32::EPSILON
    }
}

/// `BigRational -> f64` that stays finite for the huge-exponent ratios the
/// kernel tails produce (num/den conversion with a scaling fallback).
pub fn big_rational_to_f64(q: &BigRational) -> f64 {
    if let Some(v) = q.to_f64() {
        if v.is_finite() {
            return v;
        }
    }
    // Fall back on bit-length scaling: q = m * 2^e with m in [0.5, 1).
    let num = q.numer();
    let den = q.denom();
    let shift = num.bits() as i64 - den.bits() as i64;
    let scaled = if shift > 0 {
        BigRational::new(num.clone() >> shift as usize, den.clone())
    } else {
        BigRational::new(num.clone(), den.clone() >> (-shift) as usize)
    };
    let base = scaled.to_f64().unwrap_or(0.0);
    base * 2f64.powi(shift.clamp(-2000, 2000) as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn rational_conversion_handles_extreme_exponents() {
        let tiny = BigRational::new(BigInt::from(1), BigInt::from(3).pow(400u32));
        let v = big_rational_to_f64(&tiny);
        assert!(v >= 0.0 && v < 1e-150);

        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        assert!((big_rational_to_f64(&third) - 1.0 / 3.0).abs() < 1e-16);
    }

    #[test]
    fn generic_entry_points() {
        assert_eq!(f32::from_f64_lossy(0.5), 0.5f32);
        assert!(f64::unit_roundoff() < 2e-16);
    }
}
