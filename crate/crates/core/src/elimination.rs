//! Transvection words for `SL(n,R)`, length-4 factorisation by absorption, Gauss
//! decomposition `U T U⁻ U` and the length-5 factorisation built on it.

use crate::error::{Error, Result};
use crate::exactmat::{word_product, Block, Factorisation, Matrix, Side, Transvection};
use crate::monomial;
use crate::parabolic::{absorb, is_corner, LeviBase, NormalForm, Sr1Base};
use crate::rings::{sr1_witness_vec, RingElement};
use crate::sl2::{self, check_sl, trivial_factorisation};

/// Records row operations (left multiplications) and column operations (right
/// multiplications) applied to a working copy of the input.
struct Reducer {
    h: Matrix,
    left: Vec<Transvection>,
    right: Vec<Transvection>,
}

impl Reducer {
    fn new(g: &Matrix) -> Self {
        Reducer { h: g.clone(), left: vec![], right: vec![] }
    }

    fn row(&mut self, i: usize, j: usize, xi: RingElement) {
        if !xi.is_zero() {
            self.h.row_add(i, j, &xi);
            self.left.push(Transvection { i, j, xi });
        }
    }

    fn col(&mut self, i: usize, j: usize, xi: RingElement) {
        if !xi.is_zero() {
            self.h.col_add(i, j, &xi);
            self.right.push(Transvection { i, j, xi });
        }
    }

    /// From `A_m ⋯ A_1 g B_1 ⋯ B_p = h`: the word `A_1⁻¹ ⋯ A_m⁻¹ · h-part · B_p⁻¹ ⋯ B_1⁻¹`
    /// without the middle.
    fn into_word(self) -> Vec<Transvection> {
        let mut w: Vec<Transvection> = self.left.iter().map(Transvection::inverse).collect();
        w.extend(self.right.iter().rev().map(Transvection::inverse));
        w
    }

    /// Makes `h[k][k]` a unit using row operations from rows below `k`.
    fn unit_pivot(&mut self, k: usize) -> Result<()> {
        let n = self.h.n();
        if self.h.get(k, k).is_unit() {
            return Ok(());
        }
        let ring = self.h.ring().clone();
        if ring.has_sr1() {
            let c: Vec<RingElement> = (k + 1..n).map(|i| self.h.get(i, k).clone()).collect();
            let z = sr1_witness_vec(&c, self.h.get(k, k))?;
            for (off, zi) in z.into_iter().enumerate() {
                self.row(k, k + 1 + off, zi);
            }
            return Ok(());
        }
        if !ring.is_euclidean() {
            return Err(Error::CapabilityMissing(ring.to_string()));
        }
        // Euclid on the column segment below the diagonal
        loop {
            if self.h.get(k, k).is_unit() {
                return Ok(());
            }
            if let Some(i) = (k + 1..n).find(|&i| self.h.get(i, k).is_unit()) {
                let fix = &(&ring.one() - self.h.get(k, k)) * &self.h.get(i, k).invert()?;
                self.row(k, i, fix);
                return Ok(());
            }
            let pivot = (k..n)
                .filter(|&i| !self.h.get(i, k).is_zero())
                .min_by_key(|&i| self.h.get(i, k).euclid_norm().unwrap())
                .ok_or_else(|| Error::NotSL("singular column".into()))?;
            let p = self.h.get(pivot, k).clone();
            let mut changed = false;
            for i in k..n {
                if i == pivot || self.h.get(i, k).is_zero() {
                    continue;
                }
                let q = self.h.get(i, k).euclid_quotient(&p).unwrap();
                if !q.is_zero() {
                    changed = true;
                }
                self.row(i, pivot, -q);
            }
            if !changed {
                // every other entry is already smaller than the pivot: impossible unless zero
                return Err(Error::Internal("Euclidean step made no progress".into()));
            }
        }
    }
}

/// A word of transvections whose product is `g`.
pub fn eliminate(g: &Matrix) -> Result<Vec<Transvection>> {
    check_sl(g)?;
    let n = g.n();
    let ring = g.ring().clone();
    let mut red = Reducer::new(g);
    for k in 0..n.saturating_sub(1) {
        red.unit_pivot(k)?;
        let u = red.h.get(k, k).clone();
        if !u.is_one() {
            let fix = &u.invert()? * &(&ring.one() - red.h.get(k + 1, k));
            red.row(k + 1, k, fix);
            red.row(k, k + 1, &ring.one() - &u);
        }
        for i in k + 1..n {
            let x = -red.h.get(i, k);
            red.row(i, k, x);
        }
        for j in k + 1..n {
            let x = -red.h.get(k, j);
            red.col(k, j, x);
        }
    }
    if !red.h.is_identity() {
        return Err(Error::Internal(format!("elimination left {}", red.h)));
    }
    let word = red.into_word();
    debug_assert!(&word_product(&ring, n, &word) == g);
    Ok(word)
}

/// `t_1n(ξ) = t_1k(ξ) t_kn(1) t_1k(-ξ) t_kn(-1)` with `k = 2`, and the transposed identity
/// for `t_n1`.
pub fn expand_corner(t: &Transvection, n: usize) -> Result<Vec<Transvection>> {
    if n < 3 {
        return Err(Error::DimensionTooSmall(n));
    }
    if !is_corner(t, n) {
        return Err(Error::InvalidArgument(format!("{t} is not a corner of dimension {n}")));
    }
    if t.xi.is_zero() {
        return Ok(vec![]);
    }
    let ring = t.xi.ring();
    let one = ring.one();
    let (a, b, last) = (0, 1, n - 1);
    let word = if t.i == 0 {
        vec![
            Transvection { i: a, j: b, xi: t.xi.clone() },
            Transvection { i: b, j: last, xi: one.clone() },
            Transvection { i: a, j: b, xi: -&t.xi },
            Transvection { i: b, j: last, xi: -&one },
        ]
    } else {
        vec![
            Transvection { i: last, j: b, xi: -&one },
            Transvection { i: b, j: a, xi: -&t.xi },
            Transvection { i: last, j: b, xi: one },
            Transvection { i: b, j: a, xi: t.xi.clone() },
        ]
    };
    Ok(word)
}

/// Folds `word` right to left into the trivial normal form with `base` at the bottom.
pub fn fold_word(g: &Matrix, word: &[Transvection], base: &dyn LeviBase) -> Result<NormalForm> {
    let n = g.n();
    let mut nf = NormalForm::trivial(g.ring(), n, base.pairs());
    for t in word.iter().rev() {
        if n >= 3 && is_corner(t, n) {
            for x in expand_corner(t, n)?.iter().rev() {
                nf = absorb(x, &nf, base)?;
            }
        } else {
            nf = absorb(t, &nf, base)?;
        }
    }
    if nf.product() != g {
        return Err(Error::Internal("folded word does not reproduce the input".into()));
    }
    Ok(nf)
}

/// `g` as at most 4 alternating blocks fitting the slots `U L U L`.
pub fn factor_sl(g: &Matrix) -> Result<Factorisation> {
    if g.n() < 2 {
        return Err(Error::DimensionTooSmall(g.n()));
    }
    check_sl(g)?;
    if let Some(f) = trivial_factorisation(g) {
        return Ok(f);
    }
    let ring = g.ring();
    if !ring.has_sr1() {
        return Err(Error::CapabilityMissing(ring.to_string()));
    }
    if g.n() == 2 {
        return sl2::factor_sl2(g);
    }
    let word = eliminate(g)?;
    let nf = fold_word(g, &word, &Sr1Base)?;
    let mut f = nf.to_factorisation()?;
    f.word = Some(word);
    f.checked()
}

/// `g = u t v u2` with `u, u2` upper, `v` lower unitriangular and `t` diagonal.
#[derive(Clone, Debug)]
pub struct Gauss {
    pub u: Block,
    pub t: Matrix,
    pub v: Block,
    pub u2: Block,
}

impl Gauss {
    pub fn product(&self) -> Matrix {
        &(&(&self.u.mat * &self.t) * &self.v.mat) * &self.u2.mat
    }
}

pub fn gauss(g: &Matrix) -> Result<Gauss> {
    check_sl(g)?;
    let ring = g.ring().clone();
    let n = g.n();
    if !ring.has_sr1() {
        return Err(Error::CapabilityMissing(ring.to_string()));
    }
    let mut red = Reducer::new(g);
    for k in 0..n {
        // row operations from below keep the left factor upper unitriangular
        red.unit_pivot(k)?;
        let inv = red.h.get(k, k).invert()?;
        for j in k + 1..n {
            let x = -(&inv * red.h.get(k, j));
            red.col(k, j, x);
        }
    }
    let h = red.h.clone();
    let diag: Vec<RingElement> = (0..n).map(|i| h.get(i, i).clone()).collect();
    let t = Matrix::diagonal(&ring, &diag);
    let v = t.inverse()?.mul(&h)?;
    let u = word_product(&ring, n, &red.left.iter().map(Transvection::inverse).collect::<Vec<_>>());
    let u2 = word_product(&ring, n, &red.right.iter().rev().map(Transvection::inverse).collect::<Vec<_>>());
    let out = Gauss {
        u: Block::new(Side::Upper, u)?,
        t,
        v: Block::new(Side::Lower, v)?,
        u2: Block::new(Side::Upper, u2)?,
    };
    if &out.product() != g {
        return Err(Error::Internal("Gauss decomposition does not reproduce the input".into()));
    }
    Ok(out)
}

/// `g` as at most 5 alternating blocks `U L U L U`: the torus part of the Gauss decomposition
/// is written as `U L U L` and its outer letters merged into `u` and `v`.
pub fn factor5(g: &Matrix) -> Result<Factorisation> {
    let gd = gauss(g)?;
    let w = monomial::monomial_slots(&gd.t)?;
    let s = w.slots();
    let blocks = vec![
        Block::new(Side::Upper, &gd.u.mat * &s[0])?,
        Block::new(Side::Lower, s[1].clone())?,
        Block::new(Side::Upper, s[2].clone())?,
        Block::new(Side::Lower, &s[3] * &gd.v.mat)?,
        gd.u2,
    ];
    Factorisation::pruned(blocks, g.clone()).checked()
}
