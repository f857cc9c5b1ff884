//! Scalar abstraction shared by the polynomial and matrix code.
//!
//! Exact scalars ([`Rational`], [`FieldElement`](crate::FieldElement)) are the
//! ones the constructions run on. `f32`/`f64` implement the trait so exact
//! matrices can be mapped to floating point for reporting.

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

/// Exact rational numbers.
pub type Rational = num_rational::BigRational;

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
    + for<'r> AddAssign<&'r Self>
    + for<'r> SubAssign<&'r Self>
    + Send
    + Sync
{
    /// Whether equality on this type is exact.
    const EXACT: bool;

    fn mul_ref(&self, rhs: &Self) -> Self;

    /// Multiplicative inverse, `None` for zero.
    fn try_inv(&self) -> Option<Self>;

    fn from_rational(q: &Rational) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(BigInt::from(n)))
    }

    /// Rough size used to pick cheap pivots during elimination.
    fn weight(&self) -> usize {
        0
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn try_inv(&self) -> Option<Self> {
        if self.is_zero() {
            None
        } else {
            Some(self.recip())
        }
    }

    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn weight(&self) -> usize {
        (self.numer().bits() + self.denom().bits()) as usize
    }
}

macro_rules! float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn mul_ref(&self, rhs: &Self) -> Self {
                self * rhs
            }

            fn try_inv(&self) -> Option<Self> {
                if *self == 0.0 {
                    None
                } else {
                    Some(1.0 / self)
                }
            }

            fn from_rational(q: &Rational) -> Self {
                let num = q.numer().to_f64().unwrap_or(f64::NAN);
                let den = q.denom().to_f64().unwrap_or(f64::NAN);
                (num / den) as $t
            }
        }
    };
}

float_scalar!(f32);
float_scalar!(f64);

/// Parses `"p"`, `"p/q"` or `"-p/q"`.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rational::new(n, d))
            }
        }
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_rationals() {
        assert_eq!(parse_rational("3"), Some(Rational::from_i64(3)));
        assert_eq!(
            parse_rational("-6/4"),
            Some(Rational::new(BigInt::from(-3), BigInt::from(2)))
        );
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
    }

    #[test]
    fn float_inverse_of_zero_is_none() {
        assert_eq!(0.0f64.try_inv(), None);
        assert_eq!(4.0f32.try_inv(), Some(0.25));
    }
}
