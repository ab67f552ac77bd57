//! Terminal parabolic splittings of `SL(n)` and the absorption engine.
//!
//! For a terminal index `r` the positions split into the Levi part `Δ` (a principal
//! `(n-1) x (n-1)` block) and the unipotent parts `±Σ` (the remaining row and column). Every
//! unitriangular block factors as `D S` with `D` supported in `Δ` and `S` in `±Σ`, and
//! conjugating a `±Σ` matrix by a `Δ` matrix stays in `±Σ`. This lets a word of `2L` blocks be
//! rewritten as a Levi word followed by `Σ`-chunks, so left multiplication by a Levi
//! transvection reduces to the same problem one dimension lower.

use crate::elimination::expand_corner;
use crate::error::{Error, Result};
use crate::exactmat::{Block, Factorisation, Matrix, Side, Transvection};
use crate::sl2;

/// A terminal parabolic split of `SL(n)`. `r` is 1-based: `1` or `n - 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ParabolicSplit {
    n: usize,
    r: usize,
}

impl ParabolicSplit {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::DimensionTooSmall(n));
        }
        if r != 1 && r != n - 1 {
            return Err(Error::InvalidArgument(format!("r = {r} is not terminal for n = {n}")));
        }
        Ok(ParabolicSplit { n, r })
    }

    /// The split whose Levi contains `(i,j)`, preferring `r = n - 1`.
    pub fn for_position(n: usize, i: usize, j: usize) -> Result<Self> {
        if i.max(j) < n - 1 {
            Self::new(n, n - 1)
        } else if i.min(j) >= 1 {
            Self::new(n, 1)
        } else {
            Err(Error::CornerTransvection(i + 1, j + 1))
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Offset of the Levi block on the diagonal.
    pub fn levi_offset(&self) -> usize {
        if self.r == self.n - 1 {
            0
        } else {
            1
        }
    }

    /// The index outside the Levi block.
    fn outer(&self) -> usize {
        if self.r == self.n - 1 {
            self.n - 1
        } else {
            0
        }
    }

    fn in_levi(&self, i: usize) -> bool {
        i != self.outer()
    }

    pub fn member_of_delta(&self, i: usize, j: usize) -> bool {
        i != j && self.in_levi(i) && self.in_levi(j)
    }

    /// `Σ`: the upper positions in the outer row or column.
    pub fn member_of_sigma(&self, i: usize, j: usize) -> bool {
        i < j && (i == self.outer() || j == self.outer())
    }

    pub fn member_of_neg_sigma(&self, i: usize, j: usize) -> bool {
        self.member_of_sigma(j, i)
    }

    fn supported(&self, m: &Matrix, allowed: impl Fn(usize, usize) -> bool) -> bool {
        let n = m.n();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let x = m.get(i, j);
                if i == j {
                    x.is_one()
                } else {
                    allowed(i, j) || x.is_zero()
                }
            })
        })
    }

    pub fn supported_in_delta(&self, m: &Matrix) -> bool {
        self.supported(m, |i, j| self.member_of_delta(i, j))
    }

    /// Unitriangular with off-diagonal support in `Σ` (upper) or `-Σ` (lower).
    pub fn supported_in_sigma(&self, m: &Matrix, side: Side) -> bool {
        match side {
            Side::Upper => self.supported(m, |i, j| self.member_of_sigma(i, j)),
            Side::Lower => self.supported(m, |i, j| self.member_of_neg_sigma(i, j)),
        }
    }

    fn levi(&self, m: &Matrix) -> Matrix {
        m.principal(self.levi_offset(), self.n - 1)
    }

    fn embed(&self, m: &Matrix) -> Matrix {
        m.embed(self.n, self.levi_offset())
    }
}

/// `b = delta * sigma` with `delta` supported in `Δ` and `sigma` in `±Σ` on the side of `b`.
pub fn split_block(b: &Block, s: &ParabolicSplit) -> Result<(Block, Matrix)> {
    let ring = b.mat.ring();
    let delta = Matrix::from_fn(ring, s.n, |i, j| {
        if i == j || s.member_of_delta(i, j) {
            b.mat.get(i, j).clone()
        } else {
            ring.zero()
        }
    });
    let sigma = delta.inverse()?.mul(&b.mat)?;
    if !s.supported_in_sigma(&sigma, b.side) {
        return Err(Error::SupportViolation(format!("Σ-part {sigma} of {}", b.mat)));
    }
    Ok((Block::new(b.side, delta)?, sigma))
}

fn sigma_side(s: &ParabolicSplit, x: &Matrix) -> Result<Side> {
    if s.supported_in_sigma(x, Side::Upper) {
        Ok(Side::Upper)
    } else if s.supported_in_sigma(x, Side::Lower) {
        Ok(Side::Lower)
    } else {
        Err(Error::SupportViolation(format!("{x} is not supported in ±Σ")))
    }
}

/// `d^-1 x d`, checked to stay in the same `±Σ` as `x`.
pub fn conj_sigma(x: &Matrix, d: &Matrix, s: &ParabolicSplit) -> Result<Matrix> {
    let side = sigma_side(s, x)?;
    let y = d.conj_by(x)?;
    if !s.supported_in_sigma(&y, side) {
        return Err(Error::SupportViolation(format!("{y} left {}Σ", if side == Side::Upper { "" } else { "-" })));
    }
    Ok(y)
}

/// `x` conjugated the other way, `d x d^-1`.
fn conj_sigma_back(x: &Matrix, d: &Matrix, s: &ParabolicSplit) -> Result<Matrix> {
    conj_sigma(x, &d.inverse()?, s)
}

/// A pair `(v, m)` with `v` supported in `Σ` and `m` in `-Σ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaChunk {
    pub v: Matrix,
    pub m: Matrix,
}

/// `2L` alternating slots `U L U L …` (identity allowed) with their product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    slots: Vec<Matrix>,
    product: Matrix,
}

impl NormalForm {
    pub fn trivial(ring: &crate::rings::Ring, n: usize, pairs: usize) -> Self {
        NormalForm { slots: vec![Matrix::identity(ring, n); 2 * pairs], product: Matrix::identity(ring, n) }
    }

    pub fn from_slots(slots: Vec<Matrix>) -> Result<Self> {
        let first = slots.first().ok_or_else(|| Error::InvalidArgument("empty normal form".into()))?;
        if slots.len() % 2 != 0 {
            return Err(Error::InvalidArgument(format!("{} slots is odd", slots.len())));
        }
        let mut product = Matrix::identity(first.ring(), first.n());
        for (k, m) in slots.iter().enumerate() {
            if !m.is_unitriangular(Side::alternate(Side::Upper, k)) {
                return Err(Error::InvalidArgument(format!("slot {} is not unitriangular", k + 1)));
            }
            product = product.mul(m)?;
        }
        Ok(NormalForm { slots, product })
    }

    pub fn slots(&self) -> &[Matrix] {
        &self.slots
    }

    pub fn product(&self) -> &Matrix {
        &self.product
    }

    pub fn pairs(&self) -> usize {
        self.slots.len() / 2
    }

    pub fn n(&self) -> usize {
        self.product.n()
    }

    /// Pruned factorisation of the cached product.
    pub fn to_factorisation(&self) -> Result<Factorisation> {
        Factorisation::from_slots(Side::Upper, self.slots.clone(), self.product.clone())
    }
}

/// Rewrites `nf` as `Δ-word · chunks`. Chunk `k` holds the `Σ`-parts of slots `2k, 2k+1`
/// conjugated past all later `Δ`-parts.
pub fn collect(nf: &NormalForm, s: &ParabolicSplit) -> Result<(Vec<Matrix>, Vec<SigmaChunk>)> {
    let count = nf.slots.len();
    let mut deltas = Vec::with_capacity(count);
    let mut sigmas = Vec::with_capacity(count);
    for (k, m) in nf.slots.iter().enumerate() {
        let (d, x) = split_block(&Block { side: Side::alternate(Side::Upper, k), mat: m.clone() }, s)?;
        deltas.push(d.mat);
        sigmas.push(x);
    }
    // tail[k] = D_{k+1} ⋯ D_last
    let ring = nf.product.ring();
    let mut conj = vec![Matrix::identity(ring, s.n); count];
    let mut tail = Matrix::identity(ring, s.n);
    for k in (0..count).rev() {
        conj[k] = if sigmas[k].is_identity() { sigmas[k].clone() } else { conj_sigma(&sigmas[k], &tail, s)? };
        tail = deltas[k].mul(&tail)?;
    }
    let chunks = conj.chunks(2).map(|p| SigmaChunk { v: p[0].clone(), m: p[1].clone() }).collect();
    Ok((deltas, chunks))
}

/// Inverse of [`collect`]: moves each chunk letter back to its slot and merges it with the
/// `Δ`-letter there.
pub fn reinsert(delta_word: &[Matrix], chunks: &[SigmaChunk], s: &ParabolicSplit) -> Result<NormalForm> {
    if delta_word.len() != 2 * chunks.len() {
        return Err(Error::InvalidArgument(format!("{} Δ-letters for {} chunks", delta_word.len(), chunks.len())));
    }
    let ring = delta_word[0].ring();
    let letters: Vec<&Matrix> = chunks.iter().flat_map(|c| [&c.v, &c.m]).collect();
    let count = delta_word.len();
    let mut slots = vec![Matrix::identity(ring, s.n); count];
    let mut tail = Matrix::identity(ring, s.n);
    for k in (0..count).rev() {
        let side = Side::alternate(Side::Upper, k);
        let d = &delta_word[k];
        if !s.supported_in_delta(d) || !d.is_unitriangular(side) {
            return Err(Error::SupportViolation(format!("Δ-letter {} = {d}", k + 1)));
        }
        let x = letters[k];
        if !x.is_identity() && !s.supported_in_sigma(x, side) {
            return Err(Error::SupportViolation(format!("chunk letter {} = {x}", k + 1)));
        }
        let back = if x.is_identity() { x.clone() } else { conj_sigma_back(x, &tail, s)? };
        slots[k] = d.mul(&back)?;
        tail = d.mul(&tail)?;
    }
    NormalForm::from_slots(slots)
}

/// Factors `2 x 2` matrices into the `2L` slots of a normal form.
pub trait LeviBase {
    fn pairs(&self) -> usize;
    fn factor_slots(&self, g: &Matrix) -> Result<Vec<Matrix>>;
}

/// The stable-rank-1 base case, `L = 2`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sr1Base;

impl LeviBase for Sr1Base {
    fn pairs(&self) -> usize {
        2
    }

    fn factor_slots(&self, g: &Matrix) -> Result<Vec<Matrix>> {
        if g.is_identity() {
            return Ok(vec![g.clone(); 4]);
        }
        sl2::sl2_slots(g).map(|(slots, _)| slots)
    }
}

/// Left-multiplies `nf` by `t`, keeping `2L` alternating slots.
///
/// The letter must avoid the corners `(1,n)`, `(n,1)`. Letters that are corners of the Levi
/// one level down are expanded there by the commutator identity.
pub fn absorb(t: &Transvection, nf: &NormalForm, base: &dyn LeviBase) -> Result<NormalForm> {
    let n = nf.n();
    if t.i.max(t.j) >= n || t.i == t.j {
        return Err(Error::InvalidArgument(format!("{t} does not act on dimension {n}")));
    }
    if nf.pairs() != base.pairs() {
        return Err(Error::InvalidArgument(format!("{} pairs vs base with {}", nf.pairs(), base.pairs())));
    }
    if t.xi.is_zero() {
        return Ok(nf.clone());
    }
    if n >= 3 && is_corner(t, n) {
        ParabolicSplit::for_position(n, t.i, t.j)?;
    }
    let mut product = nf.product.clone();
    product.row_add(t.i, t.j, &t.xi);
    // a letter on the side of the leading nonidentity slot merges into it
    let lead = match t.side() {
        Side::Upper => Some(0),
        Side::Lower if nf.slots[0].is_identity() => Some(1),
        Side::Lower => None,
    };
    if let Some(k) = lead {
        let mut slots = nf.slots.clone();
        slots[k].row_add(t.i, t.j, &t.xi);
        return Ok(NormalForm { slots, product });
    }
    if n == 2 {
        let slots = base.factor_slots(&product)?;
        let out = NormalForm::from_slots(slots)?;
        if out.product != product {
            return Err(Error::Internal(format!("base factorisation of {product} is wrong")));
        }
        return Ok(out);
    }
    let s = ParabolicSplit::for_position(n, t.i, t.j)?;
    let (deltas, chunks) = collect(nf, &s)?;
    let sub_slots: Vec<Matrix> = deltas.iter().map(|d| s.levi(d)).collect();
    let mut sub = NormalForm::from_slots(sub_slots)?;
    let off = s.levi_offset() as isize;
    let letter = t.shifted(-off);
    let letters = if n >= 4 && is_corner(&letter, n - 1) { expand_corner(&letter, n - 1)? } else { vec![letter] };
    for x in letters.iter().rev() {
        sub = absorb(x, &sub, base)?;
    }
    let new_deltas: Vec<Matrix> = sub.slots.iter().map(|d| s.embed(d)).collect();
    let out = reinsert(&new_deltas, &chunks, &s)?;
    if out.product != product {
        return Err(Error::Internal(format!("absorbing {t} broke the product")));
    }
    Ok(out)
}

pub(crate) fn is_corner(t: &Transvection, n: usize) -> bool {
    (t.i == 0 && t.j == n - 1) || (t.i == n - 1 && t.j == 0)
}
