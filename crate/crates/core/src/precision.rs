//! Binary fixed-point evaluation of `pi` and `2cos(2 pi k / n)`.
//!
//! Values are `BigInt`s scaled by `2^bits`. Every routine works with extra
//! guard bits internally so the returned value is within a few units of the
//! last place.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Rational;

const GUARD: u32 = 32;

/// `atan(1/x) * 2^bits` by the alternating Taylor series.
fn atan_inv(x: u64, bits: u32) -> BigInt {
    let one = BigInt::one() << bits;
    let x = BigInt::from(x);
    let x2 = &x * &x;
    let mut power = &one / &x;
    let mut sum = power.clone();
    let mut k: u64 = 1;
    loop {
        power = &power / &x2;
        if power.is_zero() {
            break;
        }
        let term = &power / BigInt::from(2 * k + 1);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

/// `pi * 2^bits` via Machin's formula.
pub fn pi_fixed(bits: u32) -> BigInt {
    let w = bits + GUARD;
    let pi = atan_inv(5, w) * 16 - atan_inv(239, w) * 4;
    pi >> GUARD
}

/// `cos(theta) * 2^w` for `0 <= theta <= pi/2`, `theta` given scaled by `2^w`.
fn cos_series(theta: &BigInt, w: u32) -> BigInt {
    let one = BigInt::one() << w;
    let t2 = (theta * theta) >> w;
    let mut term = one.clone();
    let mut sum = one;
    let mut k: u64 = 1;
    loop {
        term = (&term * &t2) >> w;
        term = &term / BigInt::from((2 * k - 1) * (2 * k));
        if term.is_zero() {
            break;
        }
        if k % 2 == 1 {
            sum -= &term;
        } else {
            sum += &term;
        }
        k += 1;
    }
    sum
}

/// `2cos(2 pi k / n) * 2^bits`.
pub fn two_cos_fixed(k: i64, n: u64, bits: u32) -> BigInt {
    assert!(n >= 1, "modulus must be positive");
    let n_i = n as i128;
    let mut k = (k as i128).rem_euclid(n_i);
    if 2 * k > n_i {
        k = n_i - k;
    }
    // angle = 2 pi k / n lies in [0, pi]
    let w = bits + GUARD;
    let pi = pi_fixed(w);
    let num = BigInt::from(2 * k);
    let den = BigInt::from(n_i);
    let flip = 4 * k > n_i;
    let theta = if flip {
        // pi - angle = pi (n - 2k) / n
        (&pi * BigInt::from(n_i - 2 * k)).div_floor(&den)
    } else {
        (&pi * num).div_floor(&den)
    };
    let c: BigInt = cos_series(&theta, w) * 2;
    let c = if flip { -c } else { c };
    c >> GUARD
}

/// Dyadic rational within about `2^-bits` of `2cos(2 pi k / n)`.
pub fn two_cos(k: i64, n: u64, bits: u32) -> Rational {
    Rational::new(two_cos_fixed(k, n, bits), BigInt::one() << bits)
}

/// Converts a fixed-point integer to `f64`.
pub fn fixed_to_f64(x: &BigInt, bits: u32) -> f64 {
    let r = Rational::new(x.clone(), BigInt::one() << bits);
    rational_to_f64(&r)
}

/// Nearest-ish `f64` for a rational of any size.
pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 1e300 && d < 1e300 {
            return n / d;
        }
    }
    // shift both parts into range
    let nb = q.numer().abs().bits() as i64;
    let db = q.denom().bits() as i64;
    let shift = nb.max(db) - 60;
    let (n, d) = if shift > 0 {
        (q.numer() >> shift as usize, q.denom() >> shift as usize)
    } else {
        (q.numer().clone(), q.denom().clone())
    };
    let n = n.to_f64().unwrap_or(0.0);
    let d = d.to_f64().unwrap_or(f64::NAN);
    n / d
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi_digits() {
        let pi = fixed_to_f64(&pi_fixed(80), 80);
        assert!((pi - std::f64::consts::PI).abs() < 1e-15);
    }

    #[test]
    fn cosine_values() {
        for n in 1..40u64 {
            for k in -3..(n as i64 + 3) {
                let got = fixed_to_f64(&two_cos_fixed(k, n, 90), 90);
                let want = 2.0 * (2.0 * std::f64::consts::PI * k as f64 / n as f64).cos();
                assert!((got - want).abs() < 1e-12, "k={k} n={n} got={got} want={want}");
            }
        }
    }

    #[test]
    fn golden_ratio_to_many_bits() {
        // 2cos(2pi/5) = (sqrt5 - 1)/2 satisfies x^2 + x - 1 = 0
        let bits = 200;
        let x = two_cos(1, 5, bits);
        let resid = &x * &x + &x - Rational::one();
        let bound = Rational::new(BigInt::one(), BigInt::one() << (bits - 8));
        assert!(resid.abs() < bound);
    }
}
