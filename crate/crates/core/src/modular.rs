//! Inversion in `Z[x] / (m)` for monic `m` through word-sized primes.
//!
//! The inverse is computed modulo many primes, lifted by the Chinese
//! remainder theorem and recovered by rational reconstruction. A candidate is
//! only returned once the caller's exact check accepts it.

use std::sync::Mutex;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Rational;

const MAX_PRIMES: usize = 1 << 14;

static PRIMES: Mutex<Vec<u64>> = Mutex::new(Vec::new());

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    acc
}

fn inv_mod(a: u64, p: u64) -> u64 {
    pow_mod(a, p - 2, p)
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n.is_multiple_of(b) {
            return n == b;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'bases: for b in BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'bases;
            }
        }
        return false;
    }
    true
}

/// The `i`-th prime below `2^62`, counting down.
fn prime(i: usize) -> u64 {
    let mut primes = PRIMES.lock().unwrap_or_else(|e| e.into_inner());
    let mut candidate = primes.last().map_or((1 << 62) + 1, |&p| p);
    while primes.len() <= i {
        candidate -= 2;
        if is_prime(candidate) {
            primes.push(candidate);
        }
    }
    primes[i]
}

fn residue(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    r.iter_u64_digits().next().unwrap_or(0)
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// `(q, r)` with `a = q b + r` over `F_p`; `b` is nonzero and trimmed.
fn div_rem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead = inv_mod(*b.last().expect("nonzero divisor"), p);
    let mut q = vec![0; r.len() - b.len() + 1];
    for k in (0..q.len()).rev() {
        let f = mul_mod(r[k + b.len() - 1], lead, p);
        q[k] = f;
        if f != 0 {
            for (j, &bj) in b.iter().enumerate() {
                r[k + j] = (r[k + j] + p - mul_mod(f, bj, p)) % p;
            }
        }
    }
    trim(&mut r);
    (q, r)
}

fn mul_sub(s0: &[u64], q: &[u64], s1: &[u64], p: u64) -> Vec<u64> {
    let len = s0.len().max(q.len() + s1.len());
    let mut out = vec![0; len];
    out[..s0.len()].copy_from_slice(s0);
    for (i, &qi) in q.iter().enumerate() {
        for (j, &sj) in s1.iter().enumerate() {
            out[i + j] = (out[i + j] + p - mul_mod(qi, sj, p)) % p;
        }
    }
    trim(&mut out);
    out
}

/// Inverse of `a` modulo `(p, m)`, or `None` when they share a factor mod `p`.
fn invert_mod_p(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
    trim(&mut r1);
    let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
    while r1.len() > 1 {
        let (q, r) = div_rem(&r0, &r1, p);
        let s = mul_sub(&s0, &q, &s1, p);
        r0 = std::mem::replace(&mut r1, r);
        s0 = std::mem::replace(&mut s1, s);
    }
    let unit = *r1.first()?;
    let k = inv_mod(unit, p);
    let mut out: Vec<u64> = s1.iter().map(|&x| mul_mod(x, k, p)).collect();
    out.resize(m.len() - 1, 0);
    Some(out)
}

/// `n / d` with `n = u d mod modulus` and both below `sqrt(modulus / 2)`.
fn reconstruct(u: &BigInt, modulus: &BigInt) -> Option<Rational> {
    let bound = (modulus >> 1u32).sqrt();
    let (mut r0, mut r1) = (modulus.clone(), u.mod_floor(modulus));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r);
        let t = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(Rational::new(r1, t1))
}

/// Rational coefficients congruent to `residues`, sharing a running denominator.
fn reconstruct_all(residues: &[BigInt], modulus: &BigInt) -> Option<Vec<Rational>> {
    let mut den = BigInt::one();
    let half = modulus >> 1u32;
    let mut out = Vec::with_capacity(residues.len());
    for u in residues {
        let mut w = (u * &den).mod_floor(modulus);
        if w > half {
            w -= modulus;
        }
        if w.bits() + den.bits() + 2 < modulus.bits() {
            out.push(Rational::new(w, den.clone()));
            continue;
        }
        let q = reconstruct(&w, modulus)?;
        let scaled = &den * q.denom();
        let previous = std::mem::replace(&mut den, scaled);
        out.push(q / Rational::from_integer(previous));
    }
    Some(out)
}

/// Inverse of `a` in `Q[x] / (m)` for integer `a` and monic integer `m` with
/// `deg a < deg m`, accepted by `check`. `None` if no candidate passes.
pub fn invert(a: &[BigInt], m: &[BigInt], check: impl Fn(&[Rational]) -> bool) -> Option<Vec<Rational>> {
    let deg = m.len() - 1;
    let mut modulus = BigInt::one();
    let mut residues = vec![BigInt::zero(); deg];
    let mut good = 0usize;
    let mut next_attempt = 1usize;
    for i in 0..MAX_PRIMES {
        let p = prime(i);
        let ap: Vec<u64> = a.iter().map(|x| residue(x, p)).collect();
        let mp: Vec<u64> = m.iter().map(|x| residue(x, p)).collect();
        let Some(inv) = invert_mod_p(&ap, &mp, p) else { continue };
        // x = r + M ((v - r) M^-1 mod p)
        let big_p = BigInt::from(p);
        let m_inv = inv_mod(residue(&modulus, p), p);
        for (r, &v) in residues.iter_mut().zip(&inv) {
            let diff = (v + p - residue(r, p)) % p;
            let k = mul_mod(diff, m_inv, p);
            if k != 0 {
                *r += &modulus * BigInt::from(k);
            }
        }
        modulus *= &big_p;
        good += 1;
        if good == next_attempt {
            next_attempt = good + good.div_ceil(2);
            if let Some(candidate) = reconstruct_all(&residues, &modulus) {
                if check(&candidate) {
                    return Some(candidate);
                }
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn small_primes() {
        let found: Vec<u64> = (0..40).filter(|&n| is_prime(n)).collect();
        assert_eq!(found, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]);
        assert!(!is_prime(3_215_031_751));
        assert!(is_prime((1 << 61) - 1));
    }

    #[test]
    fn inverse_mod_p() {
        // (1 + x)^-1 mod x^2 + 1 over F_7 is 4 + 3x
        assert_eq!(invert_mod_p(&[1, 1], &[1, 0, 1], 7), Some(vec![4, 3]));
        assert_eq!(invert_mod_p(&[1, 1], &[1, 0, 6], 7), None);
    }

    #[test]
    fn reconstructs_fractions() {
        let m = BigInt::from(1_000_003i64);
        let u = (BigInt::from(-22) * BigInt::from(7).modpow(&(&m - 2), &m)).mod_floor(&m);
        assert_eq!(reconstruct(&u, &m), Some(Rational::new((-22).into(), 7.into())));
    }

    #[test]
    fn golden_inverse() {
        // (3 + 5x)(8 - 5x) = -1 modulo x^2 - x - 1
        let m = ints(&[-1, -1, 1]);
        let a = ints(&[3, 5]);
        let check = |c: &[Rational]| {
            let (c0, c1) = (c[0].clone(), c[1].clone());
            let (a0, a1) = (Rational::from_integer(3.into()), Rational::from_integer(5.into()));
            // (a0 + a1 x)(c0 + c1 x) with x^2 = x + 1
            let k = &a1 * &c1;
            &a0 * &c0 + &k == Rational::one() && &a0 * &c1 + &a1 * &c0 + k == Rational::zero()
        };
        let inv = invert(&a, &m, check).unwrap();
        assert_eq!(inv, vec![Rational::from_integer((-8).into()), Rational::from_integer(5.into())]);
    }
}
