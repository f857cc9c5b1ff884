//! Rational coefficient vectors with a shared denominator.
//!
//! Canonical form: trailing zeros stripped, positive denominator, gcd of the
//! numerators and the denominator equal to 1, and the `Small` variant used
//! whenever every value fits in an `i64`. Canonical vectors compare equal iff
//! they represent the same rationals, so `PartialEq` can be derived.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::scalar::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum QVec {
    Small { num: Vec<i64>, den: i64 },
    Big { num: Vec<BigInt>, den: BigInt },
}

/// Powers `x^k mod psi` for `k = d ..= 2d-2`, `psi` monic of degree `d`.
#[derive(Debug)]
pub(crate) struct ReductionTable {
    pub degree: usize,
    pub big: Vec<Vec<BigInt>>,
    pub small: Option<Vec<Vec<i64>>>,
}

impl ReductionTable {
    /// `psi` given by integer coefficients, lowest first, monic.
    pub fn new(psi: &[BigInt]) -> Self {
        let d = psi.len() - 1;
        debug_assert!(psi[d].is_one());
        let mut big: Vec<Vec<BigInt>> = Vec::new();
        if d >= 1 {
            // x^d = -(psi_0 + ... + psi_{d-1} x^{d-1})
            let mut cur: Vec<BigInt> = psi[..d].iter().map(|c| -c).collect();
            let rows = d.saturating_sub(1);
            for _ in 0..rows.max(1) {
                big.push(cur.clone());
                // multiply by x and reduce
                let top = cur[d - 1].clone();
                let mut next = vec![BigInt::zero(); d];
                for i in (1..d).rev() {
                    next[i] = cur[i - 1].clone();
                }
                if !top.is_zero() {
                    for i in 0..d {
                        next[i] -= &top * &psi[i];
                    }
                }
                cur = next;
            }
        }
        let small = big
            .iter()
            .map(|row| row.iter().map(|c| c.to_i64()).collect::<Option<Vec<_>>>())
            .collect::<Option<Vec<_>>>();
        Self { degree: d, big, small }
    }
}

fn gcd_i128(a: i128, b: i128) -> i128 {
    a.gcd(&b)
}

impl QVec {
    pub fn zero() -> Self {
        QVec::Small { num: Vec::new(), den: 1 }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_i128(vec![n as i128], 1).expect("fits")
    }

    pub fn from_rational(q: &Rational) -> Self {
        Self::from_big(vec![q.numer().clone()], q.denom().clone())
    }

    pub fn from_rationals(qs: &[Rational]) -> Self {
        let mut den = BigInt::one();
        for q in qs {
            den = den.lcm(q.denom());
        }
        let num = qs
            .iter()
            .map(|q| q.numer() * (&den / q.denom()))
            .collect();
        Self::from_big(num, den)
    }

    /// Canonicalises an `i128` vector; `None` on overflow during sign fix.
    fn from_i128(mut num: Vec<i128>, mut den: i128) -> Option<Self> {
        while num.last() == Some(&0) {
            num.pop();
        }
        if num.is_empty() {
            return Some(Self::zero());
        }
        if den < 0 {
            den = den.checked_neg()?;
            for n in num.iter_mut() {
                *n = n.checked_neg()?;
            }
        }
        let mut g = den;
        for &n in &num {
            if g == 1 {
                break;
            }
            g = gcd_i128(g, n);
        }
        if g > 1 {
            den /= g;
            for n in num.iter_mut() {
                *n /= g;
            }
        }
        let small_den = i64::try_from(den).ok();
        let small_num: Option<Vec<i64>> = num.iter().map(|&n| i64::try_from(n).ok()).collect();
        match (small_num, small_den) {
            (Some(num), Some(den)) => Some(QVec::Small { num, den }),
            _ => Some(QVec::Big {
                num: num.into_iter().map(BigInt::from).collect(),
                den: BigInt::from(den),
            }),
        }
    }

    fn from_big(mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        while num.last().is_some_and(|n| n.is_zero()) {
            num.pop();
        }
        if num.is_empty() {
            return Self::zero();
        }
        if den.is_negative() {
            den = -den;
            for n in num.iter_mut() {
                *n = -&*n;
            }
        }
        let mut g = den.clone();
        for n in &num {
            if g.is_one() {
                break;
            }
            g = g.gcd(n);
        }
        if !g.is_one() {
            den = &den / &g;
            for n in num.iter_mut() {
                *n = &*n / &g;
            }
        }
        let small_den = den.to_i64();
        let small_num: Option<Vec<i64>> = num.iter().map(|n| n.to_i64()).collect();
        match (small_num, small_den) {
            (Some(num), Some(den)) => QVec::Small { num, den },
            _ => QVec::Big { num, den },
        }
    }

    fn to_big(&self) -> (Vec<BigInt>, BigInt) {
        match self {
            QVec::Small { num, den } => (
                num.iter().map(|&n| BigInt::from(n)).collect(),
                BigInt::from(*den),
            ),
            QVec::Big { num, den } => (num.clone(), den.clone()),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            QVec::Small { num, .. } => num.len(),
            QVec::Big { num, .. } => num.len(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.len() == 0
    }

    pub fn is_integral(&self) -> bool {
        match self {
            QVec::Small { den, .. } => *den == 1,
            QVec::Big { den, .. } => den.is_one(),
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, QVec::Small { num, den } if *den == 1 && num.as_slice() == [1])
    }

    pub fn coeff(&self, i: usize) -> Rational {
        match self {
            QVec::Small { num, den } => Rational::new(
                BigInt::from(num.get(i).copied().unwrap_or(0)),
                BigInt::from(*den),
            ),
            QVec::Big { num, den } => Rational::new(
                num.get(i).cloned().unwrap_or_else(BigInt::zero),
                den.clone(),
            ),
        }
    }

    pub fn to_rationals(&self) -> Vec<Rational> {
        (0..self.len()).map(|i| self.coeff(i)).collect()
    }

    /// Numerators and the common denominator.
    pub fn parts(&self) -> (Vec<BigInt>, BigInt) {
        self.to_big()
    }

    /// Sum of absolute numerators (as a bit-length bound) and denominator bits.
    pub fn size_bits(&self) -> (u64, u64) {
        let (num, den) = self.to_big();
        let sum: BigInt = num.iter().map(|n| n.abs()).sum();
        (sum.bits(), den.bits())
    }

    pub fn weight(&self) -> usize {
        match self {
            QVec::Small { num, den } => {
                num.len() * 8 + (if *den == 1 { 0 } else { 4 }) + num.iter().filter(|n| n.unsigned_abs() > 1).count()
            }
            QVec::Big { num, .. } => num.len() * 64 + 1000,
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            QVec::Small { num, den } => {
                if num.iter().all(|&n| n != i64::MIN) {
                    QVec::Small { num: num.iter().map(|n| -n).collect(), den: *den }
                } else {
                    let (n, d) = self.to_big();
                    Self::from_big(n.into_iter().map(|x| -x).collect(), d)
                }
            }
            QVec::Big { num, den } => QVec::Big { num: num.iter().map(|n| -n).collect(), den: den.clone() },
        }
    }

    fn add_sub(&self, other: &Self, negate_other: bool) -> Self {
        if let (QVec::Small { num: a, den: da }, QVec::Small { num: b, den: db }) = (self, other) {
            if let Some(r) = add_small(a, *da, b, *db, negate_other) {
                return r;
            }
        }
        let (a, da) = self.to_big();
        let (b, db) = other.to_big();
        let l = da.lcm(&db);
        let fa = &l / &da;
        let fb = &l / &db;
        let n = a.len().max(b.len());
        let zero = BigInt::zero();
        let num = (0..n)
            .map(|i| {
                let x = a.get(i).unwrap_or(&zero) * &fa;
                let y = b.get(i).unwrap_or(&zero) * &fb;
                if negate_other {
                    x - y
                } else {
                    x + y
                }
            })
            .collect();
        Self::from_big(num, l)
    }

    pub fn add(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        self.add_sub(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.neg();
        }
        self.add_sub(other, true)
    }

    /// Multiplies by a constant (a vector of length <= 1).
    pub fn scale(&self, k: &Self) -> Self {
        debug_assert!(k.len() <= 1);
        if self.is_zero() || k.is_zero() {
            return Self::zero();
        }
        if k.is_one() {
            return self.clone();
        }
        if let (QVec::Small { num, den }, QVec::Small { num: kn, den: kd }) = (self, k) {
            let kn = kn[0] as i128;
            let kd = *kd as i128;
            let prod: Option<Vec<i128>> = num.iter().map(|&n| (n as i128).checked_mul(kn)).collect();
            if let (Some(prod), Some(d)) = (prod, (*den as i128).checked_mul(kd)) {
                if let Some(r) = Self::from_i128(prod, d) {
                    return r;
                }
            }
        }
        let (num, den) = self.to_big();
        let (kn, kd) = k.to_big();
        Self::from_big(num.into_iter().map(|n| n * &kn[0]).collect(), den * kd)
    }

    /// Product modulo the polynomial encoded by `table`.
    pub fn mul_reduce(&self, other: &Self, table: &ReductionTable) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.len() == 1 {
            return other.scale(self);
        }
        if other.len() == 1 {
            return self.scale(other);
        }
        if let (QVec::Small { num: a, den: da }, QVec::Small { num: b, den: db }, Some(small)) =
            (self, other, table.small.as_ref())
        {
            if let Some(r) = mul_small(a, *da, b, *db, table.degree, small) {
                return r;
            }
        }
        let (a, da) = self.to_big();
        let (b, db) = other.to_big();
        let mut prod = vec![BigInt::zero(); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        let d = table.degree;
        if prod.len() > d {
            let (low, high) = prod.split_at_mut(d);
            for (k, h) in high.iter().enumerate() {
                if h.is_zero() {
                    continue;
                }
                for (i, r) in table.big[k].iter().enumerate() {
                    low[i] += h * r;
                }
            }
            prod.truncate(d);
        }
        Self::from_big(prod, da * db)
    }

    /// Reduces an arbitrary-length vector modulo the table polynomial.
    pub fn reduce(&self, table: &ReductionTable) -> Self {
        let d = table.degree;
        if self.len() <= d {
            return self.clone();
        }
        let (mut num, den) = self.to_big();
        // the table covers exponents up to 2d-2; fold higher terms one step at a time
        while num.len() > d {
            let top_idx = num.len() - 1;
            let top = num.pop().expect("nonempty");
            if top.is_zero() {
                continue;
            }
            // x^top_idx = x^(top_idx - d) * x^d
            let shift = top_idx - d;
            for (i, r) in table.big[0].iter().enumerate() {
                num[shift + i] += &top * r;
            }
        }
        Self::from_big(num, den)
    }
}

fn add_small(a: &[i64], da: i64, b: &[i64], db: i64, negate: bool) -> Option<QVec> {
    let da = da as i128;
    let db = db as i128;
    let g = gcd_i128(da, db);
    let l = (da / g).checked_mul(db)?;
    let fa = l / da;
    let fb = l / db;
    let n = a.len().max(b.len());
    let mut num = Vec::with_capacity(n);
    for i in 0..n {
        let x = (*a.get(i).unwrap_or(&0) as i128).checked_mul(fa)?;
        let y = (*b.get(i).unwrap_or(&0) as i128).checked_mul(fb)?;
        num.push(if negate { x.checked_sub(y)? } else { x.checked_add(y)? });
    }
    QVec::from_i128(num, l)
}

fn mul_small(
    a: &[i64],
    da: i64,
    b: &[i64],
    db: i64,
    d: usize,
    table: &[Vec<i64>],
) -> Option<QVec> {
    let mut prod = vec![0i128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        let x = x as i128;
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = prod[i + j].checked_add(x.checked_mul(y as i128)?)?;
        }
    }
    if prod.len() > d {
        let (low, high) = prod.split_at_mut(d);
        for (k, &h) in high.iter().enumerate() {
            if h == 0 {
                continue;
            }
            for (i, &r) in table[k].iter().enumerate() {
                low[i] = low[i].checked_add(h.checked_mul(r as i128)?)?;
            }
        }
        prod.truncate(d);
    }
    let den = (da as i128).checked_mul(db as i128)?;
    QVec::from_i128(prod, den)
}
