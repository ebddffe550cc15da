//! The two arithmetic modes: exact rationals and 64-bit floats.
//!
//! Every quantity the library computes is defined over the rationals; the
//! oracle paths must be exact, while large-scale experiments only need f64.
//! Code that works in both modes is generic over [`Scalar`].

use std::fmt::{Debug, Display};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num::bigint::BigInt;
use num::traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational scalar, the default arithmetic of the library.
pub type Rat = num::BigRational;

/// Arithmetic shared by the exact ([`Rat`]) and floating ([`f64`]) modes.
pub trait Scalar:
    Clone
    + Debug
    + Display
    + PartialEq
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Neg<Output = Self>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    /// True when arithmetic carries no rounding error.
    const EXACT: bool;

    fn from_i64(v: i64) -> Self;

    /// The exact ratio `num / den`; `den` must be nonzero.
    fn ratio(num: i64, den: i64) -> Self;

    /// Convert from an exact rational (rounding in float mode).
    fn from_rat(r: &Rat) -> Self;

    fn to_f64(&self) -> f64;

    fn abs(&self) -> Self;

    fn from_u64(v: u64) -> Self {
        Self::from_i64(i64::try_from(v).expect("value exceeds i64"))
    }

    /// `a * b` without forcing the caller to clone; rationals multiply by
    /// reference (one allocation instead of three in the hot loops).
    fn mul_ref(a: &Self, b: &Self) -> Self {
        a.clone() * b.clone()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        num as f64 / den as f64
    }

    fn from_rat(r: &Rat) -> Self {
        ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }
}

impl Scalar for Rat {
    const EXACT: bool = true;

    fn from_i64(v: i64) -> Self {
        Rat::from_integer(BigInt::from(v))
    }

    fn ratio(num: i64, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        Rat::new(BigInt::from(num), BigInt::from(den))
    }

    fn from_rat(r: &Rat) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn mul_ref(a: &Self, b: &Self) -> Self {
        a * b
    }
}

/// Rational from a u64 numerator (convenience; N and friends are u64).
pub fn rat_u64(v: u64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Rational from an i64.
pub fn rat_i64(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

/// Exact ratio of two integers.
pub fn rat(num: i64, den: i64) -> Rat {
    <Rat as Scalar>::ratio(num, den)
}
