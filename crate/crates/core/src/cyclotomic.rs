//! Exact arithmetic in the real cyclotomic field `Q(c)`, `c = 2cos(2 pi / N)`.
//!
//! Elements are stored in the power basis of `c` and reduced modulo the
//! minimal polynomial of `c`. Rational constants may carry no context at all,
//! which lets `zero()` and `one()` exist without knowing the conductor.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{CoxError, Result};
use crate::modular;
use crate::polynomial::{ext_gcd, Polynomial};
use crate::precision;
use crate::qvec::{QVec, ReductionTable};
use crate::scalar::{Rational, Scalar};

/// Polynomials with rational coefficients, lowest degree first.
pub type IntPolynomial = Polynomial<Rational>;

/// Integer coefficients of the `n`-th cyclotomic polynomial, lowest first.
///
/// Uses `Phi_n = prod_{d | n} (x^d - 1)^{mu(n/d)}`; multiplying or dividing
/// by a binomial is linear time.
pub fn cyclotomic_coeffs(n: u64) -> Vec<BigInt> {
    assert!(n >= 1);
    let divisors: Vec<u64> = (1..=n).filter(|d| n.is_multiple_of(*d)).collect();
    let mut poly = vec![BigInt::one()];
    let mut divide_by = Vec::new();
    for &d in &divisors {
        match mobius(n / d) {
            1 => {
                // multiply by x^d - 1
                let mut out = vec![BigInt::zero(); poly.len() + d as usize];
                for (i, c) in poly.iter().enumerate() {
                    out[i + d as usize] += c;
                    out[i] -= c;
                }
                poly = out;
            }
            -1 => divide_by.push(d as usize),
            _ => {}
        }
    }
    for d in divide_by {
        // exact division by x^d - 1: p_k = q_{k-d} - q_k
        let deg = poly.len() - 1;
        let mut q = vec![BigInt::zero(); deg + 1 - d];
        for k in (d..=deg).rev() {
            let above = if k < q.len() { q[k].clone() } else { BigInt::zero() };
            q[k - d] = &poly[k] + above;
        }
        poly = q;
    }
    poly
}

fn mobius(mut n: u64) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    (1..=n).filter(|k| k.gcd(&n) == 1).count() as u64
}

/// Integer coefficients of the minimal polynomial of `2cos(2 pi / n)`.
fn real_minimal_coeffs(n: u64) -> Vec<BigInt> {
    match n {
        1 => return vec![BigInt::from(-2), BigInt::one()],
        2 => return vec![BigInt::from(2), BigInt::one()],
        _ => {}
    }
    // Phi_n(z) = z^d * psi(z + 1/z) with Phi_n palindromic of degree 2d, so
    // psi(x) = p_d + sum_{i >= 1} p_{d+i} D_i(x) where D_i(z + 1/z) = z^i + z^-i.
    let p = cyclotomic_coeffs(n);
    let d = (p.len() - 1) / 2;
    let mut psi = vec![BigInt::zero(); d + 1];
    psi[0] = p[d].clone();
    let mut prev: Vec<BigInt> = vec![BigInt::from(2)];
    let mut cur: Vec<BigInt> = vec![BigInt::zero(), BigInt::one()];
    for i in 1..=d {
        for (j, c) in cur.iter().enumerate() {
            psi[j] += &p[d + i] * c;
        }
        let mut next = vec![BigInt::zero(); cur.len() + 1];
        for (j, c) in cur.iter().enumerate() {
            next[j + 1] += c;
        }
        for (j, c) in prev.iter().enumerate() {
            next[j] -= c;
        }
        prev = std::mem::replace(&mut cur, next);
    }
    psi
}

/// Minimal polynomial of `2cos(2 pi / n)` over `Q`.
pub fn minimal_poly_real_cyclotomic(n: u64) -> IntPolynomial {
    Polynomial::new(
        real_minimal_coeffs(n)
            .into_iter()
            .map(Rational::from_integer)
            .collect(),
    )
}

/// Shared data for one conductor.
pub struct FieldContext {
    conductor: u64,
    min_poly: IntPolynomial,
    min_coeffs: Vec<BigInt>,
    table: ReductionTable,
}

impl fmt::Debug for FieldContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldContext(N={}, degree={})", self.conductor, self.degree())
    }
}

/// Builds the context for conductor `n >= 1`.
pub fn field_context(n: u64) -> Arc<FieldContext> {
    FieldContext::new(n)
}

impl FieldContext {
    pub fn new(n: u64) -> Arc<Self> {
        assert!(n >= 1, "conductor must be positive");
        let coeffs = real_minimal_coeffs(n);
        let table = ReductionTable::new(&coeffs);
        let min_poly = Polynomial::new(coeffs.iter().cloned().map(Rational::from_integer).collect());
        Arc::new(Self { conductor: n, min_poly, min_coeffs: coeffs, table })
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    pub fn min_poly(&self) -> &IntPolynomial {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.table.degree
    }

    /// The power-basis generator `c = 2cos(2 pi / N)`.
    pub fn generator(self: &Arc<Self>) -> FieldElement {
        self.element(&[Rational::zero(), Rational::one()])
    }

    /// Element with the given power-basis coefficients (reduced if longer
    /// than the degree).
    pub fn element(self: &Arc<Self>, coeffs: &[Rational]) -> FieldElement {
        let v = QVec::from_rationals(coeffs).reduce(&self.table);
        FieldElement { ctx: Some(self.clone()), v }
    }

    pub fn from_rational(self: &Arc<Self>, q: &Rational) -> FieldElement {
        FieldElement { ctx: Some(self.clone()), v: QVec::from_rational(q) }
    }

    pub fn from_i64(self: &Arc<Self>, n: i64) -> FieldElement {
        FieldElement { ctx: Some(self.clone()), v: QVec::from_i64(n) }
    }

    pub fn zero(self: &Arc<Self>) -> FieldElement {
        self.from_i64(0)
    }

    pub fn one(self: &Arc<Self>) -> FieldElement {
        self.from_i64(1)
    }

    fn same(&self, other: &Self) -> bool {
        self.conductor == other.conductor
    }
}

/// An element of `Q(2cos(2 pi / N))`.
#[derive(Clone)]
pub struct FieldElement {
    ctx: Option<Arc<FieldContext>>,
    v: QVec,
}

impl FieldElement {
    /// A rational constant not tied to any context.
    pub fn rational(q: &Rational) -> Self {
        Self { ctx: None, v: QVec::from_rational(q) }
    }

    pub fn integer(n: i64) -> Self {
        Self { ctx: None, v: QVec::from_i64(n) }
    }

    pub fn context(&self) -> Option<&Arc<FieldContext>> {
        self.ctx.as_ref()
    }

    pub fn conductor(&self) -> Option<u64> {
        self.ctx.as_ref().map(|c| c.conductor)
    }

    /// Returns the same value attached to `ctx`.
    pub fn in_context(&self, ctx: &Arc<FieldContext>) -> Result<Self> {
        match &self.ctx {
            Some(own) if !own.same(ctx) && !self.is_rational() => {
                Err(CoxError::ContextMismatch(own.conductor, ctx.conductor))
            }
            _ => Ok(Self { ctx: Some(ctx.clone()), v: self.v.clone() }),
        }
    }

    /// Power-basis coefficients, padded to the context degree.
    pub fn coeffs(&self) -> Vec<Rational> {
        let n = self.ctx.as_ref().map_or(1, |c| c.degree()).max(self.v.len());
        (0..n).map(|i| self.v.coeff(i)).collect()
    }

    /// Numerators (unpadded) over the common positive denominator.
    pub fn numerators_and_denominator(&self) -> (Vec<BigInt>, BigInt) {
        self.v.parts()
    }

    pub fn is_rational(&self) -> bool {
        self.v.len() <= 1
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.v.coeff(0))
    }

    /// Whether the element lies in `Z[c]`, the ring of integers of the field.
    pub fn is_integral(&self) -> bool {
        self.v.is_integral()
    }

    fn join(&self, other: &Self) -> Result<Option<Arc<FieldContext>>> {
        match (&self.ctx, &other.ctx) {
            (Some(a), Some(b)) => {
                if a.same(b) {
                    Ok(Some(a.clone()))
                } else {
                    Err(CoxError::ContextMismatch(a.conductor, b.conductor))
                }
            }
            (Some(a), None) => Ok(Some(a.clone())),
            (None, b) => Ok(b.clone()),
        }
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        Ok(Self { ctx: self.join(other)?, v: self.v.add(&other.v) })
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        Ok(Self { ctx: self.join(other)?, v: self.v.sub(&other.v) })
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        let ctx = self.join(other)?;
        let v = if self.v.len() <= 1 {
            other.v.scale(&self.v)
        } else if other.v.len() <= 1 {
            self.v.scale(&other.v)
        } else {
            let table = &ctx.as_ref().expect("irrational elements carry a context").table;
            self.v.mul_reduce(&other.v, table)
        };
        Ok(Self { ctx, v })
    }

    /// Equality that reports mixing of incompatible contexts.
    pub fn checked_eq(&self, other: &Self) -> Result<bool> {
        self.join(other)?;
        Ok(self.v == other.v)
    }

    pub fn invert(&self) -> Result<Self> {
        if self.v.is_zero() {
            return Err(CoxError::DivisionByZero);
        }
        if self.is_rational() {
            let q = self.v.coeff(0);
            return Ok(Self { ctx: self.ctx.clone(), v: QVec::from_rational(&q.recip()) });
        }
        let ctx = self.ctx.as_ref().expect("irrational elements carry a context");
        let (num, den) = self.v.parts();
        let int = QVec::from_rationals(&num.iter().cloned().map(Rational::from_integer).collect::<Vec<_>>());
        let check = |c: &[Rational]| QVec::from_rationals(c).mul_reduce(&int, &ctx.table).is_one();
        let coeffs = match modular::invert(&num, &ctx.min_coeffs, check) {
            Some(c) => c,
            None => {
                let a = Polynomial::new(self.v.to_rationals());
                let (g, s, _) = ext_gcd(&a, &ctx.min_poly);
                if g != Polynomial::one() {
                    return Err(CoxError::Internal("minimal polynomial is reducible".into()));
                }
                return Ok(ctx.element(s.coeffs()));
            }
        };
        let v = QVec::from_rationals(&coeffs).scale(&QVec::from_rational(&Rational::from_integer(den)));
        Ok(Self { ctx: Some(ctx.clone()), v })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.checked_mul(&other.invert()?)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self { ctx: self.ctx.clone(), v: QVec::from_i64(1) };
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        acc
    }

    /// Dyadic rational within `2^-bits` of the real value.
    pub fn approximate(&self, bits: u32) -> Rational {
        let (num, den) = self.v.parts();
        if num.len() <= 1 {
            return self.v.coeff(0);
        }
        let n = self.conductor().expect("irrational elements carry a context");
        let (sum_bits, _) = self.v.size_bits();
        let guard = 16 + sum_bits as u32 + 2 * num.len() as u32;
        let w = bits + guard;
        let c = precision::two_cos_fixed(1, n, w);
        // Horner in fixed point
        let mut acc = BigInt::zero();
        for a in num.iter().rev() {
            acc = ((&acc * &c) >> w) + (a << w);
        }
        let value = acc.div_floor(&den);
        Rational::new(value >> guard, BigInt::one() << bits)
    }

    pub fn to_f64(&self) -> f64 {
        precision::rational_to_f64(&self.approximate(64))
    }

    /// Rough size used to pick cheap pivots.
    pub fn weight(&self) -> usize {
        self.v.weight()
    }
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        if self.v != other.v {
            return false;
        }
        if self.is_rational() {
            return true;
        }
        match (&self.ctx, &other.ctx) {
            (Some(a), Some(b)) => a.same(b),
            _ => false,
        }
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.conductor() {
            Some(n) => write!(f, "[{self}]_{n}"),
            None => write!(f, "[{self}]"),
        }
    }
}

impl fmt::Display for FieldElement {
    /// Written as a polynomial in `c`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, q) in self.v.to_rationals().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let neg = *q < Rational::zero();
            let mag = if neg { -q.clone() } else { q.clone() };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let mono = match i {
                0 => String::new(),
                1 => "c".to_string(),
                _ => format!("c^{i}"),
            };
            if i == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{mono}")?;
            } else {
                write!(f, "{mag}*{mono}")?;
            }
        }
        Ok(())
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $checked:ident) => {
        impl<'a> $tr<&'a FieldElement> for &'a FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'a FieldElement) -> FieldElement {
                self.$checked(rhs).expect("field context mismatch")
            }
        }
        impl $tr<FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: FieldElement) -> FieldElement {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a FieldElement> for FieldElement {
            type Output = FieldElement;
            fn $method(self, rhs: &'a FieldElement) -> FieldElement {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add, checked_add);
binop!(Sub, sub, checked_sub);
binop!(Mul, mul, checked_mul);

impl Neg for FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { ctx: self.ctx, v: self.v.neg() }
    }
}

impl Neg for &FieldElement {
    type Output = FieldElement;
    fn neg(self) -> FieldElement {
        FieldElement { ctx: self.ctx.clone(), v: self.v.neg() }
    }
}

impl<'a> AddAssign<&'a FieldElement> for FieldElement {
    fn add_assign(&mut self, rhs: &'a FieldElement) {
        *self = &*self + rhs;
    }
}

impl<'a> SubAssign<&'a FieldElement> for FieldElement {
    fn sub_assign(&mut self, rhs: &'a FieldElement) {
        *self = &*self - rhs;
    }
}

impl<'a> MulAssign<&'a FieldElement> for FieldElement {
    fn mul_assign(&mut self, rhs: &'a FieldElement) {
        *self = &*self * rhs;
    }
}

impl Zero for FieldElement {
    fn zero() -> Self {
        FieldElement::integer(0)
    }
    fn is_zero(&self) -> bool {
        self.v.is_zero()
    }
}

impl One for FieldElement {
    fn one() -> Self {
        FieldElement::integer(1)
    }
    fn is_one(&self) -> bool {
        self.v.is_one()
    }
}

impl Scalar for FieldElement {
    const EXACT: bool = true;

    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn try_inv(&self) -> Option<Self> {
        self.invert().ok()
    }

    fn from_rational(q: &Rational) -> Self {
        FieldElement::rational(q)
    }

    fn from_i64(n: i64) -> Self {
        FieldElement::integer(n)
    }

    fn weight(&self) -> usize {
        self.v.weight()
    }
}

/// Dickson values `(D_j(x), D_{j+1}(x))` by a Lucas ladder.
fn dickson_pair(x: &FieldElement, two: &FieldElement, j: u64) -> (FieldElement, FieldElement) {
    let mut lo = two.clone();
    let mut hi = x.clone();
    if j == 0 {
        return (lo, hi);
    }
    for bit in (0..64 - j.leading_zeros()).rev() {
        let cross = &(&lo * &hi) - x;
        if (j >> bit) & 1 == 1 {
            hi = &(&hi * &hi) - two;
            lo = cross;
        } else {
            lo = &(&lo * &lo) - two;
            hi = cross;
        }
    }
    (lo, hi)
}

/// `2cos(2 pi k / m)` as an element of `ctx`; requires `m | N`.
pub fn cos_element(ctx: &Arc<FieldContext>, k: i64, m: u64) -> Result<FieldElement> {
    let n = ctx.conductor;
    if m == 0 || !n.is_multiple_of(m) {
        return Err(CoxError::NonDivisorOrder { order: m, conductor: n });
    }
    let j = (k as i128 * (n / m) as i128).rem_euclid(n as i128) as u64;
    let j = j.min(n - j);
    let two = ctx.from_i64(2);
    Ok(dickson_pair(&ctx.generator(), &two, j).0)
}

/// The field automorphism `c -> 2cos(2 pi j / N)`, with images of the
/// powers of `c` precomputed.
#[derive(Clone, Debug)]
pub struct GaloisMap {
    ctx: Arc<FieldContext>,
    index: u64,
    images: Vec<QVec>,
}

impl GaloisMap {
    pub fn new(ctx: &Arc<FieldContext>, j: i64) -> Result<Self> {
        let n = ctx.conductor;
        let jr = (j as i128).rem_euclid(n as i128) as u64;
        if (j.unsigned_abs()).gcd(&n) != 1 {
            return Err(CoxError::NotCoprime { index: j, conductor: n });
        }
        let image = cos_element(ctx, jr as i64, n)?;
        let mut images = Vec::with_capacity(ctx.degree());
        let mut p = ctx.one();
        for _ in 0..ctx.degree() {
            images.push(p.v.clone());
            p = &p * &image;
        }
        Ok(Self { ctx: ctx.clone(), index: jr, images })
    }

    /// Galois index reduced modulo `N`.
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn context(&self) -> &Arc<FieldContext> {
        &self.ctx
    }

    /// Whether the map is the identity on the whole field.
    pub fn is_identity(&self) -> bool {
        let n = self.ctx.conductor;
        self.ctx.degree() == 1 || self.index % n == 1 || (self.index + 1).is_multiple_of(n)
    }

    pub fn apply(&self, x: &FieldElement) -> Result<FieldElement> {
        if let Some(own) = &x.ctx {
            if !own.same(&self.ctx) && !x.is_rational() {
                return Err(CoxError::ContextMismatch(own.conductor, self.ctx.conductor));
            }
        }
        if x.is_rational() || self.is_identity() {
            return Ok(FieldElement { ctx: x.ctx.clone(), v: x.v.clone() });
        }
        let mut acc = QVec::zero();
        for (i, q) in x.v.to_rationals().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            acc = acc.add(&self.images[i].scale(&QVec::from_rational(q)));
        }
        Ok(FieldElement { ctx: Some(self.ctx.clone()), v: acc })
    }
}

/// Applies the automorphism `c -> 2cos(2 pi j / N)` to `x`.
pub fn galois(ctx: &Arc<FieldContext>, j: i64, x: &FieldElement) -> Result<FieldElement> {
    GaloisMap::new(ctx, j)?.apply(x)
}
