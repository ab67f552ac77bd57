//! Elements of the localisation `Z[1/p]`, kept in the canonical form `a * p^v` with `p ∤ a`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// An element `a * p^v` of `Z[1/p]`.
///
/// Invariant: either `a == 0 && v == 0`, or `p` does not divide `a`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LocalizedInteger {
    a: BigInt,
    v: i64,
    p: u64,
}

fn pow_p(p: u64, e: u64) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

/// `(a / p^e, e)` with `e` maximal; `a` nonzero. Divides by `p^(2^i)` for growing `i`, then
/// descends, so the cost stays near-linear in the valuation.
fn strip_p(mut a: BigInt, p: u64) -> (BigInt, u64) {
    if p == 2 {
        let e = a.trailing_zeros().unwrap_or(0);
        return (a >> e, e);
    }
    let mut powers = vec![BigInt::from(p)];
    let mut e = 0u64;
    loop {
        let last = powers.last().unwrap();
        let (q, r) = a.div_rem(last);
        if !r.is_zero() {
            break;
        }
        a = q;
        e += 1 << (powers.len() - 1);
        let next = last * last;
        if next.bits() > a.bits() + 1 {
            break;
        }
        powers.push(next);
    }
    for (i, pw) in powers.iter().enumerate().rev() {
        let (q, r) = a.div_rem(pw);
        if r.is_zero() {
            a = q;
            e += 1 << i;
        }
    }
    (a, e)
}

impl LocalizedInteger {
    /// Builds `a * p^v` and normalises it.
    pub fn new(a: BigInt, v: i64, p: u64) -> Self {
        if a.is_zero() {
            return Self { a, v: 0, p };
        }
        let (a, e) = strip_p(a, p);
        Self { a, v: v + e as i64, p }
    }

    pub fn from_integer(a: impl Into<BigInt>, p: u64) -> Self {
        Self::new(a.into(), 0, p)
    }

    pub fn zero(p: u64) -> Self {
        Self { a: BigInt::zero(), v: 0, p }
    }

    pub fn one(p: u64) -> Self {
        Self { a: BigInt::one(), v: 0, p }
    }

    /// `p^e` for any integer exponent.
    pub fn p_power(e: i64, p: u64) -> Self {
        Self { a: BigInt::one(), v: e, p }
    }

    /// The `p`-free part `a`.
    pub fn unit_part(&self) -> &BigInt {
        &self.a
    }

    /// The exponent `v`; for nonzero elements this is the `p`-adic valuation.
    pub fn valuation(&self) -> i64 {
        self.v
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.v == 0 && self.a.is_one()
    }

    /// Units of `Z[1/p]` are exactly `±p^k`.
    pub fn is_unit(&self) -> bool {
        self.a.abs().is_one()
    }

    pub fn invert(&self) -> Result<Self> {
        if !self.is_unit() {
            return Err(Error::NotAUnit(self.to_string()));
        }
        Ok(Self { a: self.a.clone(), v: -self.v, p: self.p })
    }

    /// Integer value if `v >= 0`.
    pub fn to_integer(&self) -> Option<BigInt> {
        if self.v < 0 {
            return None;
        }
        Some(&self.a * pow_p(self.p, self.v as u64))
    }

    pub fn to_rational(&self) -> BigRational {
        if self.v >= 0 {
            BigRational::from_integer(&self.a * pow_p(self.p, self.v as u64))
        } else {
            BigRational::new(self.a.clone(), pow_p(self.p, self.v.unsigned_abs()))
        }
    }

    /// Inverse of [`Self::to_rational`]; `None` unless the reduced denominator is a power of `p`.
    pub fn from_rational(r: &BigRational, p: u64) -> Option<Self> {
        let (den, e) = strip_p(r.denom().clone(), p);
        den.is_one().then(|| Self::new(r.numer().clone(), -(e as i64), p))
    }

    pub fn add(&self, o: &Self) -> Self {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let m = self.v.min(o.v);
        let x = &self.a * pow_p(self.p, (self.v - m) as u64);
        let y = &o.a * pow_p(self.p, (o.v - m) as u64);
        Self::new(x + y, m, self.p)
    }

    pub fn neg(&self) -> Self {
        Self { a: -&self.a, v: self.v, p: self.p }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        if self.is_zero() || o.is_zero() {
            return Self::zero(self.p);
        }
        // p is prime and divides neither factor, so the product is already canonical.
        Self { a: &self.a * &o.a, v: self.v + o.v, p: self.p }
    }

    /// Euclidean norm: `|a|`. Strictly decreases along the division chain of [`Self::euclid_quotient`].
    pub fn euclid_norm(&self) -> BigInt {
        self.a.abs()
    }

    /// A quotient `q` with `norm(self - q*divisor) < norm(divisor)`.
    ///
    /// Writing `self = a p^v`, `divisor = b p^w`, the quotient is `round(a/b) * p^(v-w)`.
    pub fn euclid_quotient(&self, divisor: &Self) -> Self {
        assert!(!divisor.is_zero(), "division by zero in Z[1/p]");
        if self.is_zero() {
            return Self::zero(self.p);
        }
        let q = round_div(&self.a, &divisor.a);
        Self::new(q, self.v - divisor.v, self.p)
    }

    /// Parses `a*p^v`, `p^v`, `a`, or `a/b` with `b` a power of `p`.
    pub fn parse(s: &str, p: u64) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("`{s}` is not an element of Z[1/{p}]"));
        if let Some((num, den)) = s.split_once('/') {
            let n: BigInt = num.trim().parse().map_err(|_| bad())?;
            let d: BigInt = den.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Self::from_rational(&BigRational::new(n, d), p).ok_or_else(bad);
        }
        let (coef, power) = match s.split_once('*') {
            Some((c, pw)) => (c.trim(), Some(pw.trim())),
            None if s.contains('^') => ("1", Some(s)),
            None => (s, None),
        };
        let a: BigInt = coef.parse().map_err(|_| bad())?;
        let v = match power {
            None => 0,
            Some(pw) => {
                let (base, exp) = pw.split_once('^').ok_or_else(bad)?;
                let base: u64 = base.trim().parse().map_err(|_| bad())?;
                if base != p {
                    return Err(bad());
                }
                exp.trim().parse::<i64>().map_err(|_| bad())?
            }
        };
        Ok(Self::new(a, v, p))
    }
}

/// Nearest-integer division, ties toward zero.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    // r has the sign of b; compare 2|r| with |b|
    let twice: BigInt = r.abs() * 2u32;
    match twice.cmp(&b.abs()) {
        Ordering::Greater => q + 1,
        Ordering::Equal if q.is_negative() => q + 1,
        _ => q,
    }
}

impl fmt::Display for LocalizedInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.v == 0 {
            write!(f, "{}", self.a)
        } else {
            write!(f, "{}*{}^{}", self.a, self.p, self.v)
        }
    }
}
