//! Exact scalar fields.
//!
//! Every algorithm in this crate is written against [`Scalar`], a thin
//! extension of [`num_traits::Num`] for exact fields. It is implemented for
//! every [`num_rational::Ratio`] over a signed integer type, so both
//! arbitrary-precision `BigRational` and machine-word `Rational64` work.
//! Floating-point types are deliberately not implementors: rank and kernel
//! computations here rely on exact zero tests.

use std::fmt::{Debug, Display};
use std::ops::Neg;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Num, Signed};

/// An exact field of characteristic zero.
pub trait Scalar:
    Clone + Debug + Display + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_int(v: i64) -> Self;

    /// Parses `p` or `p/q` with `q != 0`.
    fn parse_exact(s: &str) -> Option<Self>;

    /// `true` when the value is an integer.
    fn is_integral(&self) -> bool;
}

impl<T> Scalar for Ratio<T>
where
    T: Clone
        + Integer
        + Signed
        + FromPrimitive
        + FromStr
        + Display
        + Debug
        + Send
        + Sync
        + 'static,
{
    fn from_int(v: i64) -> Self {
        Ratio::from_integer(T::from_i64(v).expect("integer out of range for scalar type"))
    }

    fn parse_exact(s: &str) -> Option<Self> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let num = num.strip_prefix('+').unwrap_or(num).parse::<T>().ok()?;
        let den = match den {
            Some(d) => d.parse::<T>().ok()?,
            None => T::one(),
        };
        if den.is_zero() {
            return None;
        }
        Some(Ratio::new(num, den))
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}
