//! Numeric backends: exact rationals and 64-bit floats.
//!
//! The checks in this crate are exact statements about probability
//! distributions, while the factorization search is inherently approximate.
//! Operations on distributions are therefore generic over a [`Scalar`] with
//! two implementations: [`Rational`] (arbitrary precision, used by oracles
//! and certificates) and `f64` (used by the numeric searches).

use alloc::string::String;
use core::fmt::Debug;
use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

/// Arbitrary-precision rational number.
pub type Rational = Ratio<BigInt>;

/// Scalar type usable as a probability entry.
pub trait Scalar: Clone + PartialOrd + Signed + Debug + 'static {
    /// True when arithmetic over this scalar is exact.
    const EXACT: bool;

    fn from_int(n: i64) -> Self;

    /// Exact small rational `n / d`. Panics if `d == 0`.
    fn from_ratio(n: i64, d: i64) -> Self;

    /// Closest representable value to `x`. Exact for [`Rational`], since
    /// every finite float is a dyadic rational.
    fn from_f64(x: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Linear-algebra rank of a matrix over this scalar. Exact elimination
    /// for rationals, singular-value thresholding for floats.
    fn linear_rank(matrix: &crate::matrix::Mat<Self>) -> usize;

    /// Render for diagnostics ("1/6" or "0.1666...").
    fn display(&self) -> String;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_int(n: i64) -> Self {
        n as f64
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        n as f64 / d as f64
    }

    fn from_f64(x: f64) -> Self {
        x
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn linear_rank(matrix: &crate::matrix::Mat<Self>) -> usize {
        crate::linalg::rank_f64(matrix)
    }

    fn display(&self) -> String {
        alloc::format!("{self}")
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_int(n: i64) -> Self {
        Ratio::from_integer(BigInt::from(n))
    }

    fn from_ratio(n: i64, d: i64) -> Self {
        assert!(d != 0, "zero denominator");
        Ratio::new(BigInt::from(n), BigInt::from(d))
    }

    fn from_f64(x: f64) -> Self {
        FromPrimitive::from_f64(x).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn linear_rank(matrix: &crate::matrix::Mat<Self>) -> usize {
        crate::linalg::rank_exact(matrix)
    }

    fn display(&self) -> String {
        alloc::format!("{self}")
    }
}
