//! Commutative rings with exact arithmetic.
//!
//! A [`Ring`] is a runtime descriptor; a [`RingElement`] pairs a descriptor with a canonical
//! payload. Arithmetic between elements of different rings is rejected by [`arith`] and panics
//! through the operator impls, which are meant for code that has already checked descriptors
//! (matrices do so on construction).

mod localized;
mod witness;

pub use localized::LocalizedInteger;
pub use witness::{sr1_witness, sr1_witness_vec};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::error::{Error, Result};

/// The concrete rings supported.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum RingKind {
    /// `Z/m`, `m >= 2`.
    Zmod(u64),
    /// `GF(p)`, `p` prime. Same arithmetic as `Zmod(p)` but declared a field.
    PrimeField(u64),
    Rationals,
    Integers,
    /// `Z[1/p]`, `p` prime.
    LocalizedIntegers(u64),
    /// `Z/m1 × Z/m2 × …`.
    DirectProduct(Vec<u64>),
}

/// A shared ring descriptor. Equality is structural.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ring(Arc<RingKind>);

fn is_prime_u64(p: u64) -> bool {
    primal_check::miller_rabin(p)
}

impl Ring {
    pub fn new(kind: RingKind) -> Result<Self> {
        match &kind {
            RingKind::Zmod(m) if *m < 2 => {
                return Err(Error::InvalidDescriptor(format!("Z/{m} needs m >= 2")))
            }
            RingKind::PrimeField(p) | RingKind::LocalizedIntegers(p) if !is_prime_u64(*p) => {
                return Err(Error::InvalidDescriptor(format!("{p} is not prime")))
            }
            RingKind::DirectProduct(ms) => {
                if ms.is_empty() {
                    return Err(Error::InvalidDescriptor("empty direct product".into()));
                }
                if let Some(m) = ms.iter().find(|m| **m < 2) {
                    return Err(Error::InvalidDescriptor(format!("factor Z/{m} needs m >= 2")));
                }
            }
            _ => {}
        }
        if let RingKind::Zmod(m) | RingKind::PrimeField(m) = kind {
            if m > i64::MAX as u64 {
                return Err(Error::InvalidDescriptor(format!("modulus {m} too large")));
            }
        }
        Ok(Ring(Arc::new(kind)))
    }

    pub fn zmod(m: u64) -> Result<Self> {
        Self::new(RingKind::Zmod(m))
    }

    pub fn prime_field(p: u64) -> Result<Self> {
        Self::new(RingKind::PrimeField(p))
    }

    pub fn rationals() -> Self {
        Ring(Arc::new(RingKind::Rationals))
    }

    pub fn integers() -> Self {
        Ring(Arc::new(RingKind::Integers))
    }

    pub fn localized(p: u64) -> Result<Self> {
        Self::new(RingKind::LocalizedIntegers(p))
    }

    pub fn product(moduli: Vec<u64>) -> Result<Self> {
        Self::new(RingKind::DirectProduct(moduli))
    }

    pub fn kind(&self) -> &RingKind {
        &self.0
    }

    pub fn same(&self, other: &Ring) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }

    pub(crate) fn check(&self, other: &Ring) -> Result<()> {
        if self.same(other) {
            Ok(())
        } else {
            Err(Error::DescriptorMismatch(self.to_string(), other.to_string()))
        }
    }

    /// Whether the ring is declared to have stable rank 1.
    ///
    /// True for finite rings and fields; `Z` and `Z[1/p]` have stable rank 2.
    pub fn has_sr1(&self) -> bool {
        !matches!(self.kind(), RingKind::Integers | RingKind::LocalizedIntegers(_))
    }

    /// Whether the ring carries a Euclidean division ([`RingElement::euclid_quotient`]).
    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind(), RingKind::Integers | RingKind::LocalizedIntegers(_))
    }

    /// The prime `p` of `Z[1/p]`.
    pub fn localized_prime(&self) -> Option<u64> {
        match self.kind() {
            RingKind::LocalizedIntegers(p) => Some(*p),
            _ => None,
        }
    }

    fn elem(&self, value: Value) -> RingElement {
        RingElement { ring: self.clone(), value }
    }

    pub fn zero(&self) -> RingElement {
        self.from_bigint(&BigInt::zero())
    }

    pub fn one(&self) -> RingElement {
        self.from_bigint(&BigInt::one())
    }

    pub fn from_i64(&self, x: i64) -> RingElement {
        self.from_bigint(&BigInt::from(x))
    }

    /// Image of an integer under the canonical map `Z -> R`.
    pub fn from_bigint(&self, x: &BigInt) -> RingElement {
        let reduce = |m: u64| -> u64 { x.mod_floor(&BigInt::from(m)).to_u64().unwrap() };
        let value = match self.kind() {
            RingKind::Zmod(m) | RingKind::PrimeField(m) => Value::Residue(reduce(*m)),
            RingKind::DirectProduct(ms) => Value::Tuple(ms.iter().map(|m| reduce(*m)).collect()),
            RingKind::Integers => Value::Integer(x.clone()),
            RingKind::Rationals => Value::Rational(BigRational::from_integer(x.clone())),
            RingKind::LocalizedIntegers(p) => Value::Local(LocalizedInteger::from_integer(x.clone(), *p)),
        };
        self.elem(value)
    }

    /// `num/den` in `Q`, or in `Z[1/p]` when `den` is a power of `p`, or in a finite ring when
    /// `den` is invertible there.
    pub fn from_fraction(&self, num: &BigInt, den: &BigInt) -> Result<RingElement> {
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        match self.kind() {
            RingKind::Rationals => {
                Ok(self.elem(Value::Rational(BigRational::new(num.clone(), den.clone()))))
            }
            RingKind::LocalizedIntegers(p) => {
                let r = BigRational::new(num.clone(), den.clone());
                LocalizedInteger::from_rational(&r, *p)
                    .map(|x| self.elem(Value::Local(x)))
                    .ok_or_else(|| Error::Parse(format!("{num}/{den} is not in {self}")))
            }
            _ => {
                let d = self.from_bigint(den).invert()?;
                Ok(&self.from_bigint(num) * &d)
            }
        }
    }

    pub fn localized_element(&self, x: LocalizedInteger) -> Result<RingElement> {
        match self.kind() {
            RingKind::LocalizedIntegers(p) if *p == x.prime() => Ok(self.elem(Value::Local(x))),
            _ => Err(Error::DescriptorMismatch(self.to_string(), format!("Z[1/{}]", x.prime()))),
        }
    }

    pub fn tuple_element(&self, residues: &[BigInt]) -> Result<RingElement> {
        match self.kind() {
            RingKind::DirectProduct(ms) if ms.len() == residues.len() => {
                let t = ms
                    .iter()
                    .zip(residues)
                    .map(|(m, r)| r.mod_floor(&BigInt::from(*m)).to_u64().unwrap())
                    .collect();
                Ok(self.elem(Value::Tuple(t)))
            }
            _ => Err(Error::Parse(format!("tuple of length {} is not an element of {self}", residues.len()))),
        }
    }

    /// Parses the textual element forms: integers, `a/b`, `a*p^v`, `(r1,r2,…)`.
    pub fn parse_element(&self, s: &str) -> Result<RingElement> {
        let s = s.trim();
        if let RingKind::LocalizedIntegers(p) = self.kind() {
            return Ok(self.elem(Value::Local(LocalizedInteger::parse(s, *p)?)));
        }
        let bad = || Error::Parse(format!("`{s}` is not an element of {self}"));
        if let Some(inner) = s.strip_prefix('(').and_then(|t| t.strip_suffix(')')) {
            let parts = inner
                .split(',')
                .map(|t| t.trim().parse::<BigInt>().map_err(|_| bad()))
                .collect::<Result<Vec<_>>>()?;
            return self.tuple_element(&parts);
        }
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if matches!(self.kind(), RingKind::Integers) {
                let (q, r) = n.div_rem(&d);
                return if r.is_zero() { Ok(self.from_bigint(&q)) } else { Err(bad()) };
            }
            return self.from_fraction(&n, &d);
        }
        let x: BigInt = s.parse().map_err(|_| bad())?;
        Ok(self.from_bigint(&x))
    }

    /// Number of elements, for finite rings.
    pub fn size(&self) -> Option<u64> {
        match self.kind() {
            RingKind::Zmod(m) | RingKind::PrimeField(m) => Some(*m),
            RingKind::DirectProduct(ms) => ms.iter().try_fold(1u64, |acc, m| acc.checked_mul(*m)),
            _ => None,
        }
    }

    /// All elements of a finite ring, in a fixed order.
    pub fn elements(&self) -> Option<Vec<RingElement>> {
        match self.kind() {
            RingKind::Zmod(m) | RingKind::PrimeField(m) => {
                Some((0..*m).map(|r| self.elem(Value::Residue(r))).collect())
            }
            RingKind::DirectProduct(ms) => {
                let mut out: Vec<Vec<u64>> = vec![vec![]];
                for m in ms {
                    out = out
                        .into_iter()
                        .flat_map(|t| {
                            (0..*m).map(move |r| {
                                let mut t = t.clone();
                                t.push(r);
                                t
                            })
                        })
                        .collect();
                }
                Some(out.into_iter().map(|t| self.elem(Value::Tuple(t))).collect())
            }
            _ => None,
        }
    }

    /// Units of a finite ring.
    pub fn units(&self) -> Option<Vec<RingElement>> {
        self.elements().map(|v| v.into_iter().filter(|x| x.is_unit()).collect())
    }

    /// A random element. Infinite rings draw small values: integers in `[-bound, bound]`,
    /// fractions with denominators up to `bound`, and `c * p^e` with `|c|, |e| <= bound`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, bound: i64) -> RingElement {
        let bound = bound.max(1);
        match self.kind() {
            RingKind::Zmod(m) | RingKind::PrimeField(m) => self.elem(Value::Residue(rng.gen_range(0..*m))),
            RingKind::DirectProduct(ms) => {
                self.elem(Value::Tuple(ms.iter().map(|m| rng.gen_range(0..*m)).collect()))
            }
            RingKind::Integers => self.from_i64(rng.gen_range(-bound..=bound)),
            RingKind::Rationals => {
                let n = BigInt::from(rng.gen_range(-bound..=bound));
                let d = BigInt::from(rng.gen_range(1..=bound));
                self.elem(Value::Rational(BigRational::new(n, d)))
            }
            RingKind::LocalizedIntegers(p) => {
                let c = rng.gen_range(-bound..=bound);
                let e = rng.gen_range(-bound..=bound);
                self.elem(Value::Local(LocalizedInteger::new(c.into(), e, *p)))
            }
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind() {
            RingKind::Zmod(m) => write!(f, "Z/{m}"),
            RingKind::PrimeField(p) => write!(f, "GF({p})"),
            RingKind::Rationals => write!(f, "Q"),
            RingKind::Integers => write!(f, "Z"),
            RingKind::LocalizedIntegers(p) => write!(f, "Z[1/{p}]"),
            RingKind::DirectProduct(ms) => {
                let parts: Vec<String> = ms.iter().map(|m| format!("Z/{m}")).collect();
                write!(f, "{}", parts.join(" x "))
            }
        }
    }
}

impl fmt::Debug for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ring({self})")
    }
}

/// Canonical payloads.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Value {
    Residue(u64),
    Tuple(Vec<u64>),
    Integer(BigInt),
    Rational(BigRational),
    Local(LocalizedInteger),
}

/// An element of a [`Ring`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RingElement {
    ring: Ring,
    value: Value,
}

fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + b as u128) % m as u128) as u64
}

fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 + m as u128 - b as u128) % m as u128) as u64
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// The four ring operations accepted by [`arith`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Neg,
}

/// Checked arithmetic: rejects operands from different rings. `Neg` ignores `b`.
pub fn arith(a: &RingElement, b: &RingElement, op: ArithOp) -> Result<RingElement> {
    a.ring.check(&b.ring)?;
    Ok(match op {
        ArithOp::Add => a + b,
        ArithOp::Sub => a - b,
        ArithOp::Mul => a * b,
        ArithOp::Neg => -a,
    })
}

impl RingElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn value(&self) -> &Value {
        &self.value
    }

    fn binop(
        &self,
        o: &Self,
        residue: impl Fn(u64, u64, u64) -> u64,
        big: impl Fn(&BigInt, &BigInt) -> BigInt,
        rat: impl Fn(&BigRational, &BigRational) -> BigRational,
        loc: impl Fn(&LocalizedInteger, &LocalizedInteger) -> LocalizedInteger,
    ) -> Self {
        if !self.ring.same(&o.ring) {
            panic!("ring mismatch: {} vs {}", self.ring, o.ring);
        }
        let value = match (self.ring.kind(), &self.value, &o.value) {
            (RingKind::Zmod(m) | RingKind::PrimeField(m), Value::Residue(a), Value::Residue(b)) => {
                Value::Residue(residue(*a, *b, *m))
            }
            (RingKind::DirectProduct(ms), Value::Tuple(a), Value::Tuple(b)) => Value::Tuple(
                ms.iter().zip(a.iter().zip(b)).map(|(m, (x, y))| residue(*x, *y, *m)).collect(),
            ),
            (_, Value::Integer(a), Value::Integer(b)) => Value::Integer(big(a, b)),
            (_, Value::Rational(a), Value::Rational(b)) => Value::Rational(rat(a, b)),
            (_, Value::Local(a), Value::Local(b)) => Value::Local(loc(a, b)),
            _ => unreachable!("payload does not match descriptor"),
        };
        RingElement { ring: self.ring.clone(), value }
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Residue(r) => *r == 0,
            Value::Tuple(t) => t.iter().all(|r| *r == 0),
            Value::Integer(x) => x.is_zero(),
            Value::Rational(x) => x.is_zero(),
            Value::Local(x) => x.is_zero(),
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.value {
            Value::Residue(r) => *r == 1,
            Value::Tuple(t) => t.iter().all(|r| *r == 1),
            Value::Integer(x) => x.is_one(),
            Value::Rational(x) => x.is_one(),
            Value::Local(x) => x.is_one(),
        }
    }

    pub fn is_unit(&self) -> bool {
        match (&self.value, self.ring.kind()) {
            (Value::Residue(r), RingKind::Zmod(m) | RingKind::PrimeField(m)) => r.gcd(m) == 1,
            (Value::Tuple(t), RingKind::DirectProduct(ms)) => t.iter().zip(ms).all(|(r, m)| r.gcd(m) == 1),
            (Value::Integer(x), _) => x.abs().is_one(),
            (Value::Rational(x), _) => !x.is_zero(),
            (Value::Local(x), _) => x.is_unit(),
            _ => unreachable!("payload does not match descriptor"),
        }
    }

    pub fn invert(&self) -> Result<Self> {
        let not_unit = || Error::NotAUnit(format!("{self} in {}", self.ring));
        let value = match (&self.value, self.ring.kind()) {
            (Value::Residue(r), RingKind::Zmod(m) | RingKind::PrimeField(m)) => {
                Value::Residue(inv_mod(*r, *m).ok_or_else(not_unit)?)
            }
            (Value::Tuple(t), RingKind::DirectProduct(ms)) => Value::Tuple(
                t.iter().zip(ms).map(|(r, m)| inv_mod(*r, *m)).collect::<Option<_>>().ok_or_else(not_unit)?,
            ),
            (Value::Integer(x), _) if x.abs().is_one() => Value::Integer(x.clone()),
            (Value::Rational(x), _) if !x.is_zero() => Value::Rational(x.recip()),
            (Value::Local(x), _) => Value::Local(x.invert().map_err(|_| not_unit())?),
            _ => return Err(not_unit()),
        };
        Ok(RingElement { ring: self.ring.clone(), value })
    }

    pub fn as_localized(&self) -> Option<&LocalizedInteger> {
        match &self.value {
            Value::Local(x) => Some(x),
            _ => None,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match &self.value {
            Value::Rational(x) => Some(x),
            _ => None,
        }
    }

    /// Norm for Euclidean rings (`Z`, `Z[1/p]`); `None` elsewhere.
    pub fn euclid_norm(&self) -> Option<BigInt> {
        match &self.value {
            Value::Integer(x) => Some(x.abs()),
            Value::Local(x) => Some(x.euclid_norm()),
            _ => None,
        }
    }

    /// `q` with `norm(self - q*divisor) < norm(divisor)`; `None` outside Euclidean rings.
    pub fn euclid_quotient(&self, divisor: &Self) -> Option<Self> {
        let value = match (&self.value, &divisor.value) {
            (Value::Integer(a), Value::Integer(b)) => {
                let (q, r) = a.div_mod_floor(b);
                // nearest quotient keeps the remainder small in absolute value
                if r.abs() * 2 > b.abs() {
                    Value::Integer(q + 1)
                } else {
                    Value::Integer(q)
                }
            }
            (Value::Local(a), Value::Local(b)) => Value::Local(a.euclid_quotient(b)),
            _ => return None,
        };
        Some(RingElement { ring: self.ring.clone(), value })
    }
}

impl fmt::Display for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Residue(r) => write!(f, "{r}"),
            Value::Tuple(t) => {
                let parts: Vec<String> = t.iter().map(|r| r.to_string()).collect();
                write!(f, "({})", parts.join(","))
            }
            Value::Integer(x) => write!(f, "{x}"),
            Value::Rational(x) => write!(f, "{x}"),
            Value::Local(x) => write!(f, "{x}"),
        }
    }
}

impl fmt::Debug for RingElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add for &RingElement {
    type Output = RingElement;
    fn add(self, o: &RingElement) -> RingElement {
        self.binop(o, add_mod, |a, b| a + b, |a, b| a + b, |a, b| a.add(b))
    }
}

impl Sub for &RingElement {
    type Output = RingElement;
    fn sub(self, o: &RingElement) -> RingElement {
        self.binop(o, sub_mod, |a, b| a - b, |a, b| a - b, |a, b| a.sub(b))
    }
}

impl Mul for &RingElement {
    type Output = RingElement;
    fn mul(self, o: &RingElement) -> RingElement {
        self.binop(o, mul_mod, |a, b| a * b, |a, b| a * b, |a, b| a.mul(b))
    }
}

impl Neg for &RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        let value = match (&self.value, self.ring.kind()) {
            (Value::Residue(r), RingKind::Zmod(m) | RingKind::PrimeField(m)) => Value::Residue(sub_mod(0, *r, *m)),
            (Value::Tuple(t), RingKind::DirectProduct(ms)) => {
                Value::Tuple(t.iter().zip(ms).map(|(r, m)| sub_mod(0, *r, *m)).collect())
            }
            (Value::Integer(x), _) => Value::Integer(-x),
            (Value::Rational(x), _) => Value::Rational(-x),
            (Value::Local(x), _) => Value::Local(x.neg()),
            _ => unreachable!("payload does not match descriptor"),
        };
        RingElement { ring: self.ring.clone(), value }
    }
}

macro_rules! owned_binop {
    ($tr:ident, $f:ident) => {
        impl $tr for RingElement {
            type Output = RingElement;
            fn $f(self, o: RingElement) -> RingElement {
                (&self).$f(&o)
            }
        }
        impl $tr<&RingElement> for RingElement {
            type Output = RingElement;
            fn $f(self, o: &RingElement) -> RingElement {
                (&self).$f(o)
            }
        }
        impl $tr<RingElement> for &RingElement {
            type Output = RingElement;
            fn $f(self, o: RingElement) -> RingElement {
                self.$f(&o)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl Neg for RingElement {
    type Output = RingElement;
    fn neg(self) -> RingElement {
        -&self
    }
}
