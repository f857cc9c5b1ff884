//! The polynomials `u_n`, `v_n` whose roots are `4cos^2(k pi / n)`, and the
//! order classification of a pair of reflections from its Cartan coefficient.

use std::sync::Arc;

use num_integer::Integer;
use num_traits::Zero;

use crate::cyclotomic::{cos_element, minimal_poly_real_cyclotomic, FieldContext, FieldElement, IntPolynomial};
use crate::error::{CoxError, Result};
use crate::polynomial::Polynomial;
use crate::scalar::{Rational, Scalar};

/// Default bound on the order search in [`classify_pair`].
pub const DEFAULT_MAX_ORDER: u64 = 60;

/// Order of the product of two reflections.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OrderClass {
    /// Both coefficients vanish: order 2.
    Commuting,
    /// Finite order `n >= 3`.
    Finite(u64),
    /// Infinite order with Cartan coefficient 4.
    Unipotent,
    /// Not of finite order up to the search bound, and not unipotent.
    Indeterminate,
}

impl OrderClass {
    /// The finite order, if any.
    pub fn order(&self) -> Option<u64> {
        match self {
            OrderClass::Commuting => Some(2),
            OrderClass::Finite(n) => Some(*n),
            _ => None,
        }
    }
}

/// `v_n(X)`: roots `4cos^2(k pi / n)` with `gcd(k, n) = 1`, `1 <= k <= n/2`.
///
/// Since `4cos^2(k pi / n) = 2 + 2cos(2 pi k / n)`, this is the minimal
/// polynomial of `2cos(2 pi / n)` shifted by 2.
pub fn v_poly(n: u64) -> IntPolynomial {
    assert!(n >= 2, "v_n needs n >= 2");
    minimal_poly_real_cyclotomic(n).taylor_shift(&Rational::from_i64(-2))
}

/// `u_n(X)`: roots `4cos^2(k pi / n)` for `1 <= k <= n/2`, each once.
pub fn u_poly(n: u64) -> IntPolynomial {
    assert!(n >= 2, "u_n needs n >= 2");
    (2..=n)
        .filter(|d| n.is_multiple_of(*d))
        .fold(Polynomial::one(), |acc, d| acc.mul(&v_poly(d)))
}

/// The roots of `v_n` in `ctx`, ordered by ascending `k`.
pub fn v_roots(ctx: &Arc<FieldContext>, n: u64) -> Result<Vec<FieldElement>> {
    if n < 2 || !ctx.conductor().is_multiple_of(n) {
        return Err(CoxError::NonDivisorOrder { order: n, conductor: ctx.conductor() });
    }
    (1..=n / 2)
        .filter(|k| k.gcd(&n) == 1)
        .map(|k| alpha_value(ctx, k, n))
        .collect()
}

/// `4cos^2(k pi / n)` in `ctx`; requires `n | N`.
pub fn alpha_value(ctx: &Arc<FieldContext>, k: u64, n: u64) -> Result<FieldElement> {
    Ok(&ctx.from_i64(2) + &cos_element(ctx, k as i64, n)?)
}

fn annihilates(n: u64, c: &FieldElement) -> bool {
    v_poly(n).map(FieldElement::from_rational).eval(c).is_zero()
}

/// Whether some `4cos^2(k pi / n)`, `gcd(k, n) = 1`, lies within `tol` of `x`.
fn near_root(n: u64, x: f64, tol: f64) -> bool {
    (1..=n / 2).filter(|k| k.gcd(&n) == 1).any(|k| {
        let c = (std::f64::consts::PI * k as f64 / n as f64).cos();
        (4.0 * c * c - x).abs() < tol
    })
}

/// Classifies the product of two reflections from its off-diagonal Cartan
/// coefficients.
pub fn classify_pair(c_rs: &FieldElement, c_sr: &FieldElement, max_order: u64) -> OrderClass {
    if c_rs.is_zero() && c_sr.is_zero() {
        return OrderClass::Commuting;
    }
    let c = c_rs * c_sr;
    if c == FieldElement::integer(4) {
        return OrderClass::Unipotent;
    }
    // a float filter picks candidates; the exact test decides
    let approx = c.to_f64();
    if !(-1e-6..=4.0 + 1e-6).contains(&approx) {
        return OrderClass::Indeterminate;
    }
    for n in 3..=max_order {
        if near_root(n, approx, 1e-6) && annihilates(n, &c) {
            return OrderClass::Finite(n);
        }
    }
    OrderClass::Indeterminate
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::{field_context, totient};

    #[test]
    fn known_polynomials() {
        assert_eq!(v_poly(5), Polynomial::from_i64s(&[1, -3, 1]));
        assert_eq!(u_poly(5), Polynomial::from_i64s(&[1, -3, 1]));
        assert_eq!(u_poly(2), Polynomial::from_i64s(&[0, 1]));
        assert_eq!(u_poly(6), Polynomial::from_i64s(&[0, 3, -4, 1]));
        assert_eq!(v_poly(3), Polynomial::from_i64s(&[-1, 1]));
        assert_eq!(v_poly(4), Polynomial::from_i64s(&[-2, 1]));
    }

    #[test]
    fn divisibility_and_degrees() {
        for n in 3..=30u64 {
            let (_, r) = u_poly(n).div_rem(&v_poly(n)).unwrap();
            assert!(r.is_zero(), "n={n}");
            assert_eq!(v_poly(n).degree().unwrap() as u64, totient(n) / 2);
            assert_eq!(u_poly(n).degree().unwrap() as u64, n / 2);
            assert!(u_poly(n).is_integral() && u_poly(n).is_monic());
        }
    }

    #[test]
    fn roots_annihilate() {
        for n in 3..=20u64 {
            let ctx = field_context(n);
            let roots = v_roots(&ctx, n).unwrap();
            assert_eq!(roots.len() as u64, totient(n) / 2);
            for r in roots {
                assert!(annihilates(n, &r));
            }
        }
    }

    #[test]
    fn golden_roots_in_order() {
        let ctx = field_context(5);
        let roots = v_roots(&ctx, 5).unwrap();
        let s5 = 5f64.sqrt();
        assert!((roots[0].to_f64() - (3.0 + s5) / 2.0).abs() < 1e-12);
        assert!((roots[1].to_f64() - (3.0 - s5) / 2.0).abs() < 1e-12);
        assert_eq!(v_roots(&ctx, 3).unwrap_err(), CoxError::NonDivisorOrder { order: 3, conductor: 5 });
    }

    #[test]
    fn classification_examples() {
        let z = FieldElement::integer(0);
        let one = FieldElement::integer(1);
        let two = FieldElement::integer(2);
        assert_eq!(classify_pair(&z, &z, 60), OrderClass::Commuting);
        assert_eq!(classify_pair(&two, &two, 60), OrderClass::Unipotent);
        assert_eq!(classify_pair(&one, &one, 60), OrderClass::Finite(3));
        assert_eq!(classify_pair(&z, &one, 60), OrderClass::Indeterminate);
        assert_eq!(classify_pair(&FieldElement::integer(5), &one, 60), OrderClass::Indeterminate);
    }

    #[test]
    fn every_root_classifies_to_its_order() {
        for n in 3..=12u64 {
            let ctx = field_context(2 * n);
            for alpha in v_roots(&ctx, n).unwrap() {
                assert_eq!(classify_pair(&alpha, &ctx.one(), 60), OrderClass::Finite(n));
            }
        }
    }
}
