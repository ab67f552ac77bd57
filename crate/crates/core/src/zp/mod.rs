//! Factorisations over `Z[1/p]`.
//!
//! For `g = [[x, y], [z, w]]` with `x = p^α a`, `y = p^β b` (`p ∤ ab`) and `μ = min(α, β)`,
//! four right multiplications reach a lower unitriangular matrix:
//!
//! 1. `t21(k)`, `k = k0 p^(μ-β)`, turns `x` into `p^μ q` with `q = p^(α-μ) a + k0 b` a prime
//!    for which `p` is a primitive root;
//! 2. `t12(l)` with `p^u ≡ p^(β-μ) b (mod q)` and `l = (p^u - p^(β-μ) b) / q` turns `y` into
//!    the unit `p^(μ+u)`;
//! 3. `t21(θ)`, `θ = (1 - p^μ q) / p^(μ+u)`, makes the top-left entry 1;
//! 4. `t12(-p^(μ+u))` clears the top-right entry.
//!
//! Hence `g = t21(m) t12(p^(μ+u)) t21(-θ) t12(-l) t21(-k)`, pattern `L U L U L`. When `α < β`
//! the same steps run on the reversed matrix `JgJ`, giving `U L U L U`. Existence of `q` is
//! only guaranteed under the Generalised Riemann Hypothesis; the scan is bounded by `k_max`.

pub mod numtheory;

pub use numtheory::{discrete_log, factorize, find_prime_with_primitive_root, is_prime, is_primitive_root, prime_candidates};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactmat::{Block, Factorisation, Matrix, Side, Transvection};
use crate::monomial::factor_monomial;
use crate::parabolic::{reinsert, LeviBase, NormalForm, ParabolicSplit, SigmaChunk};
use crate::rings::{LocalizedInteger, Ring, RingElement};
use crate::sl2::{check_sl, mirror, torus4, trivial_factorisation};

pub const DEFAULT_K_MAX: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZpCase {
    /// `v(x) >= v(y)`, pattern `L U L U L`.
    One,
    /// `v(x) < v(y)`, pattern `U L U L U`.
    Two,
    /// A zero entry; handled through the monomial factorisation.
    Degenerate,
}

/// Parameters of the four reduction steps, for the matrix they ran on (`JgJ` in case 2).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoreTrace {
    pub alpha: i64,
    pub beta: i64,
    pub k: LocalizedInteger,
    pub q: u64,
    pub u: u64,
    pub l: BigInt,
    pub theta: LocalizedInteger,
    pub m: LocalizedInteger,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZpTrace {
    pub case: ZpCase,
    pub core: Option<CoreTrace>,
}

impl CoreTrace {
    /// Replays the four right multiplications; the result is `[[1, 0], [m, 1]]`.
    pub fn replay(&self, g: &Matrix) -> Result<Matrix> {
        let ring = g.ring();
        let p = self.k.prime();
        let e = |x: LocalizedInteger| ring.localized_element(x);
        let pu = LocalizedInteger::p_power(self.alpha.min(self.beta) + self.u as i64, p);
        let mut h = g.clone();
        h.col_add(1, 0, &e(self.k.clone())?);
        h.col_add(0, 1, &e(LocalizedInteger::from_integer(self.l.clone(), p))?);
        h.col_add(1, 0, &e(self.theta.clone())?);
        h.col_add(0, 1, &e(pu.neg())?);
        Ok(h)
    }
}

fn localized(x: &RingElement) -> Result<&LocalizedInteger> {
    x.as_localized().ok_or_else(|| Error::DescriptorMismatch(x.ring().to_string(), "Z[1/p]".into()))
}

fn to_i128(x: &BigInt) -> Result<i128> {
    x.to_i128().ok_or_else(|| Error::OutOfRange(format!("{x} exceeds 128 bits")))
}

fn p_pow_int(p: u64, e: i64) -> BigInt {
    num_traits::pow(BigInt::from(p), e as usize)
}

fn t(i: usize, j: usize, x: RingElement) -> Matrix {
    Transvection { i, j, xi: x }.matrix(2)
}

/// The four steps on a matrix with nonzero top row. Returns the slots `L U L U L`.
///
/// Among the first `candidates` admissible primes the one with the smallest discrete
/// logarithm `u` is used; entries grow like `p^u`. With `candidates = 1` this is the smallest `k`.
fn core(g: &Matrix, k_max: u64, candidates: usize) -> Result<(Vec<Matrix>, CoreTrace)> {
    let ring = g.ring();
    let (x, y) = (localized(g.get(0, 0))?, localized(g.get(0, 1))?);
    let p = x.prime();
    let (alpha, beta) = (x.valuation(), y.valuation());
    let (a, b) = (x.unit_part(), y.unit_part());
    let mu = alpha.min(beta);
    let c = a * p_pow_int(p, alpha - mu);
    let b_tilde = b * p_pow_int(p, beta - mu);
    let log_of = |q: u64| discrete_log(p, b_tilde.mod_floor(&BigInt::from(q)).to_u64().unwrap(), q);
    let mut best: Option<(u64, u64, u64)> = None;
    for cand in prime_candidates(to_i128(&c)?, to_i128(&b.abs())?, p, k_max).take(candidates.max(1)) {
        let (k, q) = cand?;
        let u = log_of(q)?;
        if best.is_none_or(|(_, _, bu)| u < bu) {
            best = Some((k, q, u));
        }
    }
    let (k_scan, q, u) = best.ok_or(Error::SearchExhausted(k_max))?;
    let k0 = if b.is_negative() { -BigInt::from(k_scan) } else { BigInt::from(k_scan) };
    let k = LocalizedInteger::new(k0, mu - beta, p);
    let el = |v: LocalizedInteger| ring.localized_element(v);

    let mut h = g.clone();
    h.col_add(1, 0, &el(k.clone())?);
    let qq = BigInt::from(q);
    if localized(h.get(0, 0))? != &LocalizedInteger::new(qq.clone(), mu, p) {
        return Err(Error::Internal(format!("step 1 produced {}", h.get(0, 0))));
    }

    let (l, rem) = (p_pow_int(p, u as i64) - &b_tilde).div_rem(&qq);
    if !rem.is_zero() {
        return Err(Error::Internal(format!("p^{u} - {b_tilde} is not divisible by {q}")));
    }
    h.col_add(0, 1, &ring.from_bigint(&l));
    let unit = LocalizedInteger::p_power(mu + u as i64, p);
    if localized(h.get(0, 1))? != &unit {
        return Err(Error::Internal(format!("step 2 produced {}", h.get(0, 1))));
    }

    let p_mu_q = LocalizedInteger::new(qq, mu, p);
    let theta = LocalizedInteger::one(p).sub(&p_mu_q).mul(&unit.invert()?);
    h.col_add(1, 0, &el(theta.clone())?);
    h.col_add(0, 1, &el(unit.neg())?);
    if !(h.get(0, 0).is_one() && h.get(0, 1).is_zero() && h.get(1, 1).is_one()) {
        return Err(Error::Internal(format!("reduction ended at {h}")));
    }
    let m = localized(h.get(1, 0))?.clone();

    let slots = vec![
        t(1, 0, el(m.clone())?),
        t(0, 1, el(unit)?),
        t(1, 0, el(theta.neg())?),
        t(0, 1, ring.from_bigint(&-&l)),
        t(1, 0, el(k.neg())?),
    ];
    Ok((slots, CoreTrace { alpha, beta, k, q, u, l, theta, m }))
}

fn check_localized_2x2(g: &Matrix) -> Result<()> {
    if g.ring().localized_prime().is_none() {
        return Err(Error::DescriptorMismatch(g.ring().to_string(), "Z[1/p]".into()));
    }
    if g.n() != 2 {
        return Err(Error::DimensionMismatch(2, g.n()));
    }
    Ok(())
}

/// A zero entry: `g` is monomial, or a monomial times one transvection.
fn degenerate(g: &Matrix) -> Result<Factorisation> {
    if g.monomial_pattern().is_some() {
        return factor_monomial(g);
    }
    let ring = g.ring();
    let (x, y, z, w) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
    let zero = ring.zero();
    let anti = |y: &RingElement, z: &RingElement| {
        Matrix::from_rows(ring, vec![vec![zero.clone(), y.clone()], vec![z.clone(), zero.clone()]])
    };
    let diag = |x: &RingElement, w: &RingElement| Matrix::diagonal(ring, &[x.clone(), w.clone()]);
    let (mono, side, xi) = if x.is_zero() {
        (anti(y, z)?, Side::Upper, z.invert()? * w)
    } else if w.is_zero() {
        (anti(y, z)?, Side::Lower, y.invert()? * x)
    } else if y.is_zero() {
        (diag(x, w), Side::Lower, w.invert()? * z)
    } else {
        (diag(x, w), Side::Upper, x.invert()? * y)
    };
    let extra = match side {
        Side::Upper => t(0, 1, xi),
        Side::Lower => t(1, 0, xi),
    };
    let mut blocks = factor_monomial(&mono)?.blocks;
    blocks.push(Block::new(side, extra)?);
    Factorisation::pruned(blocks, g.clone()).checked()
}

/// At most 5 alternating blocks, fitting `L U L U L` or `U L U L U`. The prime search takes the
/// smallest admissible `k`.
pub fn factor_sl2_zp(g: &Matrix, k_max: u64) -> Result<(Factorisation, ZpTrace)> {
    factor_sl2_zp_with(g, k_max, 1)
}

fn factor_sl2_zp_with(g: &Matrix, k_max: u64, candidates: usize) -> Result<(Factorisation, ZpTrace)> {
    check_localized_2x2(g)?;
    check_sl(g)?;
    let degenerate_trace = ZpTrace { case: ZpCase::Degenerate, core: None };
    if let Some(f) = trivial_factorisation(g) {
        return Ok((f, degenerate_trace));
    }
    if (0..2).any(|i| (0..2).any(|j| g.get(i, j).is_zero())) {
        return Ok((degenerate(g)?, degenerate_trace));
    }
    let (alpha, beta) = (localized(g.get(0, 0))?.valuation(), localized(g.get(0, 1))?.valuation());
    let (f, case, core_trace) = if alpha >= beta {
        let (slots, tr) = core(g, k_max, candidates)?;
        (Factorisation::from_slots(Side::Lower, slots, g.clone())?, ZpCase::One, tr)
    } else {
        let r = g.reversed();
        let (slots, tr) = core(&r, k_max, candidates)?;
        (mirror(&Factorisation::from_slots(Side::Lower, slots, r)?), ZpCase::Two, tr)
    };
    Ok((f.checked()?, ZpTrace { case, core: Some(core_trace) }))
}

/// Six slots `U L U L U L` for a `2 x 2` matrix with a unit entry, or `None`.
///
/// With `x` a unit, `g = t21(z/x) diag(x, x^-1) t12(y/x)`, and the torus part is `L U L U`;
/// with `w` a unit, `g = t12(y/w) diag(w^-1, w) t21(z/w)`, torus part `U L U L`. A unit in the
/// other diagonal position is first moved there by one right multiplication. Entries stay
/// polynomial in those of `g`, unlike the prime search.
fn unit_entry_slots(g: &Matrix) -> Result<Option<Vec<Matrix>>> {
    let ring = g.ring();
    let id = Matrix::identity(ring, 2);
    let (x, y, z, w) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
    let one = ring.one();
    if x.is_unit() {
        let xi = x.invert()?;
        let d = mirror(&torus4(&xi)?);
        let b: Vec<&Matrix> = d.blocks.iter().map(|b| &b.mat).collect();
        let slots = vec![id.clone(), &t(1, 0, z * &xi) * b[0], b[1].clone(), b[2].clone(), b[3] * &t(0, 1, y * &xi), id];
        return Ok(Some(slots));
    }
    if w.is_unit() {
        let wi = w.invert()?;
        let d = torus4(&wi)?;
        let b: Vec<&Matrix> = d.blocks.iter().map(|b| &b.mat).collect();
        let slots = vec![&t(0, 1, y * &wi) * b[0], b[1].clone(), b[2].clone(), b[3] * &t(1, 0, z * &wi), id.clone(), id];
        return Ok(Some(slots));
    }
    if y.is_unit() {
        // g t21(xi) has top-left entry 1
        let xi = &(&one - x) * &y.invert()?;
        let mut h = g.clone();
        h.col_add(1, 0, &xi);
        let mut slots = unit_entry_slots(&h)?.expect("top-left entry is 1");
        slots[5] = t(1, 0, -xi);
        return Ok(Some(slots));
    }
    if z.is_unit() {
        // g t12(xi) has bottom-right entry 1
        let xi = &(&one - w) * &z.invert()?;
        let mut h = g.clone();
        h.col_add(0, 1, &xi);
        let mut slots = unit_entry_slots(&h)?.expect("bottom-right entry is 1");
        slots[4] = t(0, 1, -xi);
        return Ok(Some(slots));
    }
    Ok(None)
}

/// Base case with `L = 3`. Matrices with a unit entry avoid the prime search; otherwise the
/// first `candidates` admissible primes are tried and the smallest exponent wins.
#[derive(Clone, Copy, Debug)]
pub struct ZpBase {
    pub k_max: u64,
    pub candidates: usize,
}

impl ZpBase {
    pub fn new(k_max: u64) -> Self {
        ZpBase { k_max, candidates: 256 }
    }
}

impl LeviBase for ZpBase {
    fn pairs(&self) -> usize {
        3
    }

    fn factor_slots(&self, g: &Matrix) -> Result<Vec<Matrix>> {
        if let Some(slots) = unit_entry_slots(g)? {
            return Ok(slots);
        }
        let (f, _) = factor_sl2_zp_with(g, self.k_max, self.candidates)?;
        let mut slots = vec![Matrix::identity(g.ring(), 2); 6];
        let start = usize::from(f.blocks.first().is_some_and(|b| b.side == Side::Lower));
        if f.len() + start > 6 {
            return Err(Error::Internal(format!("pattern {} does not fit six slots", f.pattern())));
        }
        for (k, b) in f.blocks.into_iter().enumerate() {
            slots[start + k] = b.mat;
        }
        Ok(slots)
    }
}

/// `(g, s, t)` with `s a + t b = g` a gcd, over a Euclidean ring.
fn ext_gcd(a: &RingElement, b: &RingElement) -> (RingElement, RingElement, RingElement) {
    let ring = a.ring();
    let (mut r0, mut r1) = (a.clone(), b.clone());
    let (mut s0, mut s1) = (ring.one(), ring.zero());
    let (mut t0, mut t1) = (ring.zero(), ring.one());
    while !r1.is_zero() {
        let q = r0.euclid_quotient(&r1).expect("Euclidean ring");
        let r2 = &r0 - &(&q * &r1);
        let s2 = &s0 - &(&q * &s1);
        let t2 = &t0 - &(&q * &t1);
        (r0, r1, s0, s1, t0, t1) = (r1, r2, s1, s2, t1, t2);
    }
    (r0, s0, t0)
}

fn gcd_is_unit(a: &RingElement, b: &RingElement) -> bool {
    ext_gcd(a, b).0.is_unit()
}

/// Smallest `x >= 0` with `gcd(a + x c, e)` a unit; one exists when `gcd(a, e, c)` is a unit
/// and `e != 0`.
fn coprime_shift(a: &RingElement, c: &RingElement, e: &RingElement) -> Result<RingElement> {
    let ring = a.ring();
    let mut x = ring.zero();
    for _ in 0..100_000 {
        if gcd_is_unit(&(a + &(&x * c)), e) {
            return Ok(x);
        }
        x = &x + &ring.one();
    }
    Err(Error::Internal(format!("no coprime shift for ({a}, {c}, {e})")))
}

/// Right multiplications by four `Σ`-letters of the `r = n-1` split, alternately lower and
/// upper, taking `g` to `diag(E, 1)`. Returns `E` and the chunks with `g = diag(E, 1) · chunks`.
fn peel_last(g: &Matrix) -> Result<(Matrix, Vec<SigmaChunk>)> {
    let ring = g.ring().clone();
    let n = g.n();
    let last = n - 1;
    let id = Matrix::identity(&ring, n);
    let mut h = g.clone();
    let lower = |b: &[RingElement]| Matrix::from_fn(&ring, n, |i, j| if i == j { ring.one() } else if i == last { b[j].clone() } else { ring.zero() });
    let upper = |a: &[RingElement]| Matrix::from_fn(&ring, n, |i, j| if i == j { ring.one() } else if j == last { a[i].clone() } else { ring.zero() });
    let apply_lower = |h: &mut Matrix, b: &[RingElement]| (0..last).for_each(|j| h.col_add(last, j, &b[j]));
    let apply_upper = |h: &mut Matrix, a: &[RingElement]| (0..last).for_each(|j| h.col_add(j, last, &a[j]));
    let neg = |v: &[RingElement]| v.iter().map(|x| -x).collect::<Vec<_>>();

    // 1. make the leading n-1 entries of the last row unimodular
    let mut b1 = vec![ring.zero(); n];
    let c = h.get(last, last).clone();
    if !c.is_zero() {
        let e = (1..last).fold(ring.zero(), |acc, j| ext_gcd(&acc, h.get(last, j)).0);
        if e.is_zero() {
            b1[1] = ring.one();
        } else {
            b1[0] = coprime_shift(h.get(last, 0), &c, &e)?;
        }
    }
    apply_lower(&mut h, &b1);
    // 2. Bezout: sum_j a_j r_j = 1 - c
    let mut coeffs = vec![ring.zero(); last];
    let mut d = ring.zero();
    for j in 0..last {
        let (g2, s, t) = ext_gcd(&d, h.get(last, j));
        coeffs.iter_mut().for_each(|x| *x = &*x * &s);
        coeffs[j] = t;
        d = g2;
    }
    let scale = &d.invert().map_err(|_| Error::Internal(format!("last row of {h} is not unimodular")))? * &(&ring.one() - h.get(last, last));
    let mut a1: Vec<RingElement> = coeffs.iter().map(|x| x * &scale).collect();
    a1.push(ring.zero());
    apply_upper(&mut h, &a1);
    // 3. clear the rest of the last row
    let mut b2: Vec<RingElement> = (0..last).map(|j| -h.get(last, j)).collect();
    b2.push(ring.zero());
    apply_lower(&mut h, &b2);
    // 4. clear the last column
    let e_block = h.principal(0, last);
    let col = Matrix::from_fn(&ring, last, |i, j| if j == 0 { h.get(i, last).clone() } else { ring.zero() });
    let sol = e_block.inverse()?.mul(&col)?;
    let mut a2: Vec<RingElement> = (0..last).map(|i| -sol.get(i, 0)).collect();
    a2.push(ring.zero());
    apply_upper(&mut h, &a2);
    if h != e_block.embed(n, 0) {
        return Err(Error::Internal(format!("peeling left {h}")));
    }
    let chunks = vec![
        SigmaChunk { v: upper(&neg(&a2)), m: lower(&neg(&b2)) },
        SigmaChunk { v: upper(&neg(&a1)), m: lower(&neg(&b1)) },
        SigmaChunk { v: id.clone(), m: id },
    ];
    Ok((e_block, chunks))
}

fn zp_slots(g: &Matrix, k_max: u64) -> Result<NormalForm> {
    let n = g.n();
    if n == 2 {
        return NormalForm::from_slots(ZpBase::new(k_max).factor_slots(g)?);
    }
    let (e, chunks) = peel_last(g)?;
    let sub = zp_slots(&e, k_max)?;
    let deltas: Vec<Matrix> = sub.slots().iter().map(|d| d.embed(n, 0)).collect();
    reinsert(&deltas, &chunks, &ParabolicSplit::new(n, n - 1)?)
}

/// At most 6 alternating blocks. For `n = 2` the 5-block output is padded with an identity
/// block to the uniform 6-block shape. For `n > 2` the last row and column are cleared by
/// `Σ`-letters down to `n = 2`, where the prime search runs once.
pub fn factor_sl_n_zp(g: &Matrix, k_max: u64) -> Result<Factorisation> {
    let ring: Ring = g.ring().clone();
    if ring.localized_prime().is_none() {
        return Err(Error::DescriptorMismatch(ring.to_string(), "Z[1/p]".into()));
    }
    if g.n() < 2 {
        return Err(Error::DimensionTooSmall(g.n()));
    }
    check_sl(g)?;
    if g.is_identity() {
        return Ok(Factorisation::new(vec![], g.clone()));
    }
    if g.n() == 2 {
        let (mut f, _) = factor_sl2_zp(g, k_max)?;
        while f.blocks.len() < 6 {
            let side = f.blocks.last().map(|b| b.side.opposite()).unwrap_or(Side::Upper);
            f.blocks.push(Block::identity(side, &ring, 2));
        }
        return f.checked();
    }
    zp_slots(g, k_max)?.to_factorisation()?.checked()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::fits_slots;
    use crate::verify::random_sl;

    fn zp(p: u64) -> Ring {
        Ring::localized(p).unwrap()
    }

    fn mat(ring: &Ring, rows: &[&[&str]]) -> Matrix {
        Matrix::from_rows(ring, rows.iter().map(|r| r.iter().map(|s| ring.parse_element(s).unwrap()).collect()).collect()).unwrap()
    }

    #[test]
    fn worked_example() {
        let r = zp(2);
        let g = mat(&r, &[&["1", "3"], &["1/2", "5/2"]]);
        let (f, trace) = factor_sl2_zp(&g, DEFAULT_K_MAX).unwrap();
        assert_eq!(trace.case, ZpCase::One);
        let c = trace.core.unwrap();
        assert_eq!((c.alpha, c.beta, c.q, c.u), (0, 0, 13, 4));
        assert_eq!(c.k, LocalizedInteger::from_integer(4, 2));
        assert_eq!(c.l, BigInt::from(1));
        assert_eq!(c.theta.to_rational(), num_rational::BigRational::new((-3).into(), 4.into()));
        assert_eq!(f.pattern(), "L U L U L");
        let expect = [
            mat(&r, &[&["1", "0"], &["3/4", "1"]]),
            mat(&r, &[&["1", "16"], &["0", "1"]]),
            mat(&r, &[&["1", "0"], &["3/4", "1"]]),
            mat(&r, &[&["1", "-1"], &["0", "1"]]),
            mat(&r, &[&["1", "0"], &["-4", "1"]]),
        ];
        for (b, e) in f.blocks.iter().zip(expect.iter()) {
            assert_eq!(&b.mat, e);
        }
        let h = c.replay(&g).unwrap();
        assert!(h.is_lower_unitriangular());
    }

    #[test]
    fn degenerate_inputs() {
        let r = zp(2);
        let (f, tr) = factor_sl2_zp(&Matrix::identity(&r, 2), DEFAULT_K_MAX).unwrap();
        assert!(f.is_empty() && tr.case == ZpCase::Degenerate);
        let (f, _) = factor_sl2_zp(&mat(&r, &[&["0", "1"], &["-1", "0"]]), DEFAULT_K_MAX).unwrap();
        assert!(f.verify().ok && f.len() <= 4);
        for rows in [
            [["0", "2"], ["-1/2", "7"]],
            [["5*2^3", "2"], ["-1/2", "0"]],
            [["4", "0"], ["9", "1/4"]],
            [["-1/8", "3"], ["0", "-8"]],
        ] {
            let g = mat(&r, &[&rows[0], &rows[1]]);
            let (f, tr) = factor_sl2_zp(&g, DEFAULT_K_MAX).unwrap();
            assert_eq!(tr.case, ZpCase::Degenerate);
            assert!(f.verify().ok);
            assert!(fits_slots(&f.blocks, Side::Upper, 5) || fits_slots(&f.blocks, Side::Lower, 5), "{}", f.pattern());
        }
    }

    #[test]
    fn case_two_by_reversal() {
        let r = zp(2);
        // v(x) = 0 < v(y) = 1
        let g = mat(&r, &[&["1", "2"], &["2", "5"]]);
        let (f, tr) = factor_sl2_zp(&g, DEFAULT_K_MAX).unwrap();
        assert_eq!(tr.case, ZpCase::Two);
        assert!(f.verify().ok);
        assert!(fits_slots(&f.blocks, Side::Upper, 5));
    }

    #[test]
    fn case_one_with_unequal_valuations() {
        let r = zp(3);
        // v(x) = 2 > v(y) = 0; exercises θ = (1 - p^μ q) / p^(μ+u)
        let g = mat(&r, &[&["9", "2"], &["4", "1"]]);
        let (x, y) = (localized(g.get(0, 0)).unwrap().valuation(), localized(g.get(0, 1)).unwrap().valuation());
        assert!(x > y, "{g:?}");
        let (f, tr) = factor_sl2_zp(&g, DEFAULT_K_MAX).unwrap();
        assert_eq!(tr.case, ZpCase::One);
        assert!(f.verify().ok);
    }

    #[test]
    fn random_instances_and_trace_invariants() {
        for p in [2u64, 3, 5, 7] {
            let r = zp(p);
            for seed in 0..25 {
                let (g, _) = random_sl(&r, 2, 3, seed);
                let (f, tr) = factor_sl2_zp(&g, DEFAULT_K_MAX).unwrap();
                assert!(f.verify().ok);
                assert!(fits_slots(&f.blocks, Side::Upper, 5) || fits_slots(&f.blocks, Side::Lower, 5));
                if let Some(c) = tr.core {
                    assert!(is_prime(c.q) && is_primitive_root(p, c.q).unwrap());
                    let (x, y) = (localized(g.get(0, 0)).unwrap().valuation(), localized(g.get(0, 1)).unwrap().valuation());
                    assert_eq!(tr.case == ZpCase::One, x >= y);
                    let target = if tr.case == ZpCase::One { g.clone() } else { g.reversed() };
                    assert!(c.replay(&target).unwrap().is_lower_unitriangular());
                }
            }
        }
    }

    #[test]
    fn higher_rank() {
        let r = zp(2);
        assert!(factor_sl_n_zp(&Matrix::identity(&r, 3), DEFAULT_K_MAX).unwrap().is_empty());
        let g = mat(&r, &[&["1", "3"], &["1/2", "5/2"]]);
        let f = factor_sl_n_zp(&g, DEFAULT_K_MAX).unwrap();
        assert_eq!(f.len(), 6);
        assert!(f.verify().ok);
        // entries of the output grow like p^u with u up to the prime found, so the
        // instances are kept short
        let cases: [(u64, usize, usize); 4] = [(2, 3, 8), (2, 4, 5), (2, 5, 5), (3, 4, 5)];
        for (p, n, len) in cases {
            let r = zp(p);
            for seed in 0..10 {
                let (g, _) = random_sl(&r, n, len, seed);
                assert!(peel_last(&g).unwrap().0.det().is_one());
                let f = factor_sl_n_zp(&g, DEFAULT_K_MAX).unwrap();
                assert!(f.verify().ok && fits_slots(&f.blocks, Side::Upper, 6), "{}", f.pattern());
            }
        }
    }

    #[test]
    fn unit_entry_base() {
        let r = zp(3);
        for rows in [
            [["5", "9"], ["1", "2"]],
            [["9", "1"], ["5", "2/3"]],
            [["5", "3"], ["3", "2"]],
            [["4", "7"], ["9", "16"]],
        ] {
            let g = mat(&r, &[&rows[0], &rows[1]]);
            let slots = unit_entry_slots(&g).unwrap().unwrap();
            let f = Factorisation::from_slots(Side::Upper, slots, g.clone()).unwrap();
            assert!(f.verify().ok, "{g}");
        }
        let g = mat(&r, &[&["7", "5"], &["11", "8"]]);
        assert!(unit_entry_slots(&g).unwrap().is_none());
    }

    #[test]
    fn rejects_other_rings() {
        let q = Ring::rationals();
        assert!(factor_sl2_zp(&Matrix::identity(&q, 2), 10).is_err());
    }
}
