//! Scalar abstraction for the numeric kernels.
//!
//! The linear algebra, lattice enumeration and envelope code is written once
//! against [`Scalar`]. Every curve-level computation instantiates it with the
//! arbitrary-precision [`crate::Rational`]; `f64` and `Ratio<i64>` are
//! supported for quick experiments, but only an exact field gives exact ties.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};

/// An ordered field with integer rounding.
pub trait Scalar: Clone + Debug + PartialOrd + Signed + FromPrimitive {
    fn from_int(n: i64) -> Self {
        Self::from_i64(n).expect("integer not representable")
    }

    fn half() -> Self {
        Self::one() / Self::from_int(2)
    }

    /// Largest integer not above `self`.
    fn floor_int(&self) -> Option<i64>;

    fn ceil_int(&self) -> Option<i64> {
        (-self.clone()).floor_int().map(|n| -n)
    }

    /// Nearest integer, ties resolved towards negative infinity.
    fn round_half_down(&self) -> Option<i64> {
        (self.clone() - Self::half()).ceil_int()
    }

    /// True when the value is an exact integer.
    fn is_integral(&self) -> bool;
}

impl Scalar for BigRational {
    fn floor_int(&self) -> Option<i64> {
        self.floor().to_integer().to_i64()
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

impl Scalar for Ratio<i64> {
    fn floor_int(&self) -> Option<i64> {
        Some(self.floor().to_integer())
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

impl Scalar for f64 {
    fn floor_int(&self) -> Option<i64> {
        if self.is_finite() {
            Some(self.floor() as i64)
        } else {
            None
        }
    }

    fn is_integral(&self) -> bool {
        self.is_finite() && self.fract().is_zero()
    }
}

/// `BigRational` from a machine integer.
pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `BigRational` from numerator and denominator.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}
