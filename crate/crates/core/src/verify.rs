//! Brute-force oracles over small finite rings, seeded instance generators and the
//! commutator decomposition of a length-4 factorisation.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exactmat::{fits_slots, word_product, Block, Factorisation, Matrix, Side, Transvection};
use crate::rings::{LocalizedInteger, Ring, RingElement, RingKind};

/// Largest `|R|^(n^2)` accepted by [`enumerate_sets`].
pub const ENUMERATION_LIMIT: u64 = 1 << 14;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumerationReport {
    pub ring: Ring,
    pub n: usize,
    pub sl: usize,
    pub ulu: usize,
    pub ulul: usize,
    pub torus: usize,
    pub ulu_torus: usize,
    pub ulul_torus: usize,
    /// `(UU⁻)² = SL`.
    pub length4_complete: bool,
    /// `UU⁻U = SL`.
    pub length3_complete: bool,
    /// `UU⁻U ∩ T = {e}`.
    pub sharp: bool,
}

fn unitriangular_all(ring: &Ring, n: usize, side: Side) -> Vec<Matrix> {
    let els = ring.elements().expect("finite ring");
    let positions: Vec<(usize, usize)> =
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).filter(|&(i, j)| if side == Side::Upper { i < j } else { i > j }).collect();
    let mut out = vec![Matrix::identity(ring, n)];
    for (i, j) in positions {
        out = out
            .into_iter()
            .flat_map(|m| {
                els.iter().map(move |x| {
                    let mut m = m.clone();
                    m.set(i, j, x.clone());
                    m
                })
            })
            .collect();
    }
    out
}

fn all_matrices(ring: &Ring, n: usize) -> Vec<Matrix> {
    let els = ring.elements().expect("finite ring");
    let mut out = vec![Matrix::zero(ring, n)];
    for pos in 0..n * n {
        out = out
            .into_iter()
            .flat_map(|m| {
                els.iter().map(move |x| {
                    let mut m = m.clone();
                    m.set(pos / n, pos % n, x.clone());
                    m
                })
            })
            .collect();
    }
    out
}

fn times(set: &HashSet<Matrix>, factors: &[Matrix]) -> HashSet<Matrix> {
    set.iter().flat_map(|a| factors.iter().map(move |b| a * b)).collect()
}

/// Exhaustive `SL(n,R)`, `UU⁻U`, `(UU⁻)²` and their intersections with the torus.
pub fn enumerate_sets(ring: &Ring, n: usize) -> Result<EnumerationReport> {
    let size = ring.size().ok_or_else(|| Error::TooLarge(format!("{ring} is infinite")))?;
    let total = (size as u128).checked_pow((n * n) as u32).unwrap_or(u128::MAX);
    if total > ENUMERATION_LIMIT as u128 || n == 0 {
        return Err(Error::TooLarge(format!("|{ring}|^{} = {total} exceeds {ENUMERATION_LIMIT}", n * n)));
    }
    let ups = unitriangular_all(ring, n, Side::Upper);
    let lows = unitriangular_all(ring, n, Side::Lower);
    let u: HashSet<Matrix> = ups.iter().cloned().collect();
    let ul = times(&u, &lows);
    let ulu = times(&ul, &ups);
    let ulul = times(&ulu, &lows);
    let sl: HashSet<Matrix> = all_matrices(ring, n).into_iter().filter(|m| m.det().is_one()).collect();
    let torus: Vec<Matrix> = sl.iter().filter(|m| m.is_diagonal()).cloned().collect();
    let ulu_torus = torus.iter().filter(|t| ulu.contains(*t)).count();
    let ulul_torus = torus.iter().filter(|t| ulul.contains(*t)).count();
    Ok(EnumerationReport {
        ring: ring.clone(),
        n,
        sl: sl.len(),
        ulu: ulu.len(),
        ulul: ulul.len(),
        torus: torus.len(),
        ulu_torus,
        ulul_torus,
        length4_complete: ulul == sl,
        length3_complete: ulu == sl,
        sharp: ulu_torus == 1,
    })
}

fn random_letter(ring: &Ring, rng: &mut ChaCha8Rng) -> RingElement {
    match ring.kind() {
        // c * p^e with |c| <= 3, |e| <= 2 keeps entries small
        RingKind::LocalizedIntegers(p) => {
            let c = rng.gen_range(-3i64..=3);
            let e = rng.gen_range(-2i64..=2);
            ring.localized_element(LocalizedInteger::new(c.into(), e, *p)).unwrap()
        }
        _ => ring.sample(rng, 5),
    }
}

/// A product of `word_len` seeded random transvections, with its word.
pub fn random_sl(ring: &Ring, n: usize, word_len: usize, seed: u64) -> (Matrix, Vec<Transvection>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut word = Vec::with_capacity(word_len);
    if n >= 2 {
        for _ in 0..word_len {
            let i = rng.gen_range(0..n);
            let j = (i + rng.gen_range(1..n)) % n;
            word.push(Transvection { i, j, xi: random_letter(ring, &mut rng) });
        }
    }
    (word_product(ring, n, &word), word)
}

/// `g = [ᵘx, ᵘv] · uv · xy` for `g = u x v y`, where `ᵘa = u a u⁻¹`.
#[derive(Clone, Debug)]
pub struct CommutatorDecomposition {
    pub commutator: Matrix,
    pub ux: Matrix,
    pub uv: Matrix,
    pub upper: Block,
    pub lower: Block,
}

pub fn commutator3(g: &Matrix, f: &Factorisation) -> Result<CommutatorDecomposition> {
    let report = f.verify();
    if !report.ok || &f.target != g || !fits_slots(&f.blocks, Side::Upper, 4) {
        return Err(Error::BadPattern(report.pattern));
    }
    let ring = g.ring();
    let n = g.n();
    let mut slots = vec![Matrix::identity(ring, n); 4];
    let start = usize::from(f.blocks.first().is_some_and(|b| b.side == Side::Lower));
    for (k, b) in f.blocks.iter().enumerate() {
        slots[start + k] = b.mat.clone();
    }
    let (u, x, v, y) = (&slots[0], &slots[1], &slots[2], &slots[3]);
    let uinv = u.inverse()?;
    let ux = &(u * x) * &uinv;
    let uv = &(u * v) * &uinv;
    let commutator = &(&(&ux * &uv) * &ux.inverse()?) * &uv.inverse()?;
    let upper = Block::new(Side::Upper, u * v)?;
    let lower = Block::new(Side::Lower, x * y)?;
    if &(&(&commutator * &upper.mat) * &lower.mat) != g {
        return Err(Error::Internal("commutator decomposition does not reproduce g".into()));
    }
    Ok(CommutatorDecomposition { commutator, ux, uv, upper, lower })
}
