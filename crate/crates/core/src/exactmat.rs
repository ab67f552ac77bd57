//! Dense square matrices over a [`Ring`], transvections, unitriangular blocks and
//! factorisations.
//!
//! Indices are 0-based in the API; `Display` and JSON use 1-based `t_ij` notation.

use std::fmt;
use std::ops::Mul;

use crate::error::{Error, Result};
use crate::rings::{Ring, RingElement};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    n: usize,
    ring: Ring,
    entries: Vec<RingElement>,
}

impl Matrix {
    pub fn identity(ring: &Ring, n: usize) -> Self {
        Self::from_fn(ring, n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    pub fn zero(ring: &Ring, n: usize) -> Self {
        Self::from_fn(ring, n, |_, _| ring.zero())
    }

    pub fn from_fn(ring: &Ring, n: usize, mut f: impl FnMut(usize, usize) -> RingElement) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        Matrix { n, ring: ring.clone(), entries }
    }

    /// Builds a matrix from rows, checking shape and descriptors.
    pub fn from_rows(ring: &Ring, rows: Vec<Vec<RingElement>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::DimensionTooSmall(0));
        }
        let mut entries = Vec::with_capacity(n * n);
        for row in rows {
            if row.len() != n {
                return Err(Error::DimensionMismatch(n, row.len()));
            }
            for x in row {
                ring.check(x.ring())?;
                entries.push(x);
            }
        }
        Ok(Matrix { n, ring: ring.clone(), entries })
    }

    /// Integer literal rows, mapped through `Z -> R`.
    pub fn from_i64(ring: &Ring, rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(ring, rows.iter().map(|r| r.iter().map(|x| ring.from_i64(*x)).collect()).collect())
    }

    pub fn diagonal(ring: &Ring, d: &[RingElement]) -> Self {
        Self::from_fn(ring, d.len(), |i, j| if i == j { d[i].clone() } else { ring.zero() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn get(&self, i: usize, j: usize) -> &RingElement {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, x: RingElement) {
        assert!(self.ring.same(x.ring()), "ring mismatch");
        self.entries[i * self.n + j] = x;
    }

    pub fn rows(&self) -> Vec<Vec<RingElement>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    fn compatible(&self, o: &Matrix) -> Result<()> {
        self.ring.check(&o.ring)?;
        if self.n != o.n {
            return Err(Error::DimensionMismatch(self.n, o.n));
        }
        Ok(())
    }

    pub fn mul(&self, o: &Matrix) -> Result<Matrix> {
        self.compatible(o)?;
        let n = self.n;
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = self.ring.zero();
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = o.get(k, j);
                    if !a.is_zero() && !b.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                out.push(acc);
            }
        }
        Ok(Matrix { n, ring: self.ring.clone(), entries: out })
    }

    /// `row_i += xi * row_j`, i.e. left multiplication by `t_ij(xi)`.
    pub fn row_add(&mut self, i: usize, j: usize, xi: &RingElement) {
        if xi.is_zero() {
            return;
        }
        for k in 0..self.n {
            let d = xi * self.get(j, k);
            let v = self.get(i, k) + &d;
            self.entries[i * self.n + k] = v;
        }
    }

    /// `col_j += xi * col_i`, i.e. right multiplication by `t_ij(xi)`.
    pub fn col_add(&mut self, i: usize, j: usize, xi: &RingElement) {
        if xi.is_zero() {
            return;
        }
        for k in 0..self.n {
            let d = self.get(k, i) * xi;
            let v = self.get(k, j) + &d;
            self.entries[k * self.n + j] = v;
        }
    }

    pub fn apply_transvection(&self, t: &Transvection, side: Action) -> Result<Matrix> {
        self.ring.check(t.xi.ring())?;
        if t.i.max(t.j) >= self.n {
            return Err(Error::DimensionMismatch(self.n, t.i.max(t.j) + 1));
        }
        let mut g = self.clone();
        match side {
            Action::Left => g.row_add(t.i, t.j, &t.xi),
            Action::Right => g.col_add(t.i, t.j, &t.xi),
        }
        Ok(g)
    }

    pub fn transpose(&self) -> Matrix {
        Self::from_fn(&self.ring, self.n, |i, j| self.get(j, i).clone())
    }

    /// `J g J` with `J` the reversal permutation: entry `(i,j)` moves to `(n-1-i, n-1-j)`.
    /// Swaps upper and lower unitriangular matrices.
    pub fn reversed(&self) -> Matrix {
        let n = self.n;
        Self::from_fn(&self.ring, n, |i, j| self.get(n - 1 - i, n - 1 - j).clone())
    }

    /// The `size x size` block starting at `(offset, offset)`.
    pub fn principal(&self, offset: usize, size: usize) -> Matrix {
        Self::from_fn(&self.ring, size, |i, j| self.get(offset + i, offset + j).clone())
    }

    /// Embeds `self` as the principal block at `offset` of an `n x n` identity.
    pub fn embed(&self, n: usize, offset: usize) -> Matrix {
        let m = self.n;
        Self::from_fn(&self.ring, n, |i, j| {
            if (offset..offset + m).contains(&i) && (offset..offset + m).contains(&j) {
                self.get(i - offset, j - offset).clone()
            } else if i == j {
                self.ring.one()
            } else {
                self.ring.zero()
            }
        })
    }

    pub fn is_identity(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() }))
    }

    pub fn is_upper_unitriangular(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i).is_one() && (0..i).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_lower_unitriangular(&self) -> bool {
        (0..self.n).all(|i| self.get(i, i).is_one() && (i + 1..self.n).all(|j| self.get(i, j).is_zero()))
    }

    pub fn is_unitriangular(&self, side: Side) -> bool {
        match side {
            Side::Upper => self.is_upper_unitriangular(),
            Side::Lower => self.is_lower_unitriangular(),
        }
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    /// For a monomial matrix, `perm[j]` is the row of the unit in column `j`.
    pub fn monomial_pattern(&self) -> Option<Vec<usize>> {
        let mut perm = Vec::with_capacity(self.n);
        let mut seen = vec![false; self.n];
        for j in 0..self.n {
            let mut row = None;
            for i in 0..self.n {
                let x = self.get(i, j);
                if !x.is_zero() {
                    if row.is_some() || !x.is_unit() {
                        return None;
                    }
                    row = Some(i);
                }
            }
            let r = row?;
            if seen[r] {
                return None;
            }
            seen[r] = true;
            perm.push(r);
        }
        Some(perm)
    }

    /// Coefficients `[1, c_1, …, c_n]` of `det(xI - A)`, by Berkowitz's division-free method.
    pub fn charpoly(&self) -> Vec<RingElement> {
        let r = &self.ring;
        let mut p = vec![r.one()];
        for k in 0..self.n {
            // c = [1, -a_kk, -R S, -R M S, …, -R M^{k-1} S] with M the leading k x k block
            let mut c = Vec::with_capacity(k + 2);
            c.push(r.one());
            c.push(-self.get(k, k));
            let mut s: Vec<RingElement> = (0..k).map(|i| self.get(i, k).clone()).collect();
            for step in 0..k {
                let rs = (0..k).fold(r.zero(), |acc, j| &acc + &(self.get(k, j) * &s[j]));
                c.push(-rs);
                if step + 1 < k {
                    s = (0..k)
                        .map(|i| (0..k).fold(r.zero(), |acc, j| &acc + &(self.get(i, j) * &s[j])))
                        .collect();
                }
            }
            let mut next = Vec::with_capacity(k + 2);
            for i in 0..k + 2 {
                let mut acc = r.zero();
                for (j, pj) in p.iter().enumerate().take(i + 1) {
                    acc = &acc + &(&c[i - j] * pj);
                }
                next.push(acc);
            }
            p = next;
        }
        p
    }

    pub fn det(&self) -> RingElement {
        let p = self.charpoly();
        let last = p[self.n].clone();
        if self.n % 2 == 0 {
            last
        } else {
            -last
        }
    }

    pub fn classify(&self) -> Flags {
        let upper = self.is_upper_unitriangular();
        let lower = self.is_lower_unitriangular();
        let diagonal = self.is_diagonal() && (0..self.n).all(|i| self.get(i, i).is_unit());
        Flags {
            upper_unitriangular: upper,
            lower_unitriangular: lower,
            diagonal,
            monomial: self.monomial_pattern().is_some(),
            identity: upper && lower,
            sl: self.det().is_one(),
        }
    }

    /// Inverse of an invertible matrix: back substitution for unitriangular input, otherwise
    /// Cayley–Hamilton on the characteristic polynomial.
    pub fn inverse(&self) -> Result<Matrix> {
        if self.is_upper_unitriangular() {
            return Ok(self.unitriangular_inverse_upper());
        }
        if self.is_lower_unitriangular() {
            return Ok(self.transpose().unitriangular_inverse_upper().transpose());
        }
        let p = self.charpoly();
        let n = self.n;
        let pn_inv = p[n].invert().map_err(|_| Error::NotAUnit(format!("det {}", self.det())))?;
        // A^{-1} = -(A^{n-1} + c_1 A^{n-2} + … + c_{n-1}) / c_n
        let mut acc = Matrix::identity(&self.ring, n);
        for c in p.iter().take(n).skip(1) {
            acc = acc.mul(self)?;
            for i in 0..n {
                let v = acc.get(i, i) + c;
                acc.set(i, i, v);
            }
        }
        let s = -pn_inv;
        Ok(acc.scale(&s))
    }

    fn unitriangular_inverse_upper(&self) -> Matrix {
        let n = self.n;
        let mut inv = Matrix::identity(&self.ring, n);
        // column by column: solve U x = e_j from the bottom
        for j in 0..n {
            for i in (0..j).rev() {
                let mut acc = self.ring.zero();
                for k in i + 1..=j {
                    acc = &acc + &(self.get(i, k) * inv.get(k, j));
                }
                inv.set(i, j, -acc);
            }
        }
        inv
    }

    pub fn scale(&self, s: &RingElement) -> Matrix {
        Self::from_fn(&self.ring, self.n, |i, j| self.get(i, j) * s)
    }

    /// `self^{-1} x self`.
    pub fn conj_by(&self, x: &Matrix) -> Result<Matrix> {
        self.inverse()?.mul(x)?.mul(self)
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, o: &Matrix) -> Matrix {
        Matrix::mul(self, o).expect("incompatible matrices")
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self
            .entries
            .chunks(self.n)
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
            .collect();
        write!(f, "[{}]", rows.join(","))
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self} over {}", self.ring)
    }
}

/// Structural predicates returned by [`Matrix::classify`]. `diagonal` means a torus element
/// up to the determinant (unit diagonal entries, zeros elsewhere).
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Flags {
    pub upper_unitriangular: bool,
    pub lower_unitriangular: bool,
    pub diagonal: bool,
    pub monomial: bool,
    pub identity: bool,
    pub sl: bool,
}

impl Flags {
    pub fn names(&self) -> Vec<&'static str> {
        let all = [
            (self.upper_unitriangular, "upper_unitriangular"),
            (self.lower_unitriangular, "lower_unitriangular"),
            (self.diagonal, "diagonal"),
            (self.monomial, "monomial"),
            (self.identity, "identity"),
            (self.sl, "sl"),
        ];
        all.iter().filter(|(b, _)| *b).map(|(_, s)| *s).collect()
    }
}

/// Whether a transvection multiplies from the left (row operation) or right (column operation).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Left,
    Right,
}

/// Upper or lower unitriangular.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Upper,
    Lower,
}

impl Side {
    pub fn letter(self) -> &'static str {
        match self {
            Side::Upper => "U",
            Side::Lower => "L",
        }
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::Upper => Side::Lower,
            Side::Lower => Side::Upper,
        }
    }

    /// Side of the `k`-th slot of an alternating word starting with `first`.
    pub fn alternate(first: Side, k: usize) -> Side {
        if k % 2 == 0 {
            first
        } else {
            first.opposite()
        }
    }
}

/// `t_ij(xi) = e + xi e_ij`, `i != j`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Transvection {
    pub i: usize,
    pub j: usize,
    pub xi: RingElement,
}

impl Transvection {
    pub fn new(i: usize, j: usize, xi: RingElement) -> Result<Self> {
        if i == j {
            return Err(Error::InvalidArgument(format!("transvection needs i != j, got ({i},{i})")));
        }
        Ok(Transvection { i, j, xi })
    }

    pub fn side(&self) -> Side {
        if self.i < self.j {
            Side::Upper
        } else {
            Side::Lower
        }
    }

    pub fn matrix(&self, n: usize) -> Matrix {
        let mut m = Matrix::identity(self.xi.ring(), n);
        m.set(self.i, self.j, self.xi.clone());
        m
    }

    pub fn inverse(&self) -> Transvection {
        Transvection { i: self.i, j: self.j, xi: -&self.xi }
    }

    /// The same letter with indices moved by `offset` (Levi embedding).
    pub fn shifted(&self, offset: isize) -> Transvection {
        Transvection {
            i: (self.i as isize + offset) as usize,
            j: (self.j as isize + offset) as usize,
            xi: self.xi.clone(),
        }
    }
}

impl fmt::Display for Transvection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "t{},{}({})", self.i + 1, self.j + 1, self.xi)
    }
}

impl fmt::Debug for Transvection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Product of a word of transvections, left to right.
pub fn word_product(ring: &Ring, n: usize, word: &[Transvection]) -> Matrix {
    let mut m = Matrix::identity(ring, n);
    for t in word {
        m.col_add(t.i, t.j, &t.xi);
    }
    m
}

/// An element of `U` or `U⁻`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub side: Side,
    pub mat: Matrix,
}

impl Block {
    pub fn new(side: Side, mat: Matrix) -> Result<Self> {
        if !mat.is_unitriangular(side) {
            return Err(Error::InvalidArgument(format!("{mat} is not {side:?} unitriangular")));
        }
        Ok(Block { side, mat })
    }

    pub fn identity(side: Side, ring: &Ring, n: usize) -> Self {
        Block { side, mat: Matrix::identity(ring, n) }
    }
}

/// Drops identity blocks and merges neighbours on the same side until the word alternates.
pub fn prune(blocks: Vec<Block>) -> Vec<Block> {
    let mut out: Vec<Block> = Vec::with_capacity(blocks.len());
    for b in blocks {
        if b.mat.is_identity() {
            continue;
        }
        match out.last_mut() {
            Some(last) if last.side == b.side => {
                last.mat = &last.mat * &b.mat;
                if last.mat.is_identity() {
                    out.pop();
                }
            }
            _ => out.push(b),
        }
    }
    // a pop can expose two equal sides; one more pass settles it
    if out.windows(2).any(|w| w[0].side == w[1].side) {
        prune(out)
    } else {
        out
    }
}

/// Whether an alternating word fits into `slots` alternating slots starting with `first`.
pub fn fits_slots(blocks: &[Block], first: Side, slots: usize) -> bool {
    let alternates = blocks.windows(2).all(|w| w[0].side != w[1].side);
    let skip = usize::from(blocks.first().is_some_and(|b| b.side != first));
    alternates && blocks.len() + skip <= slots
}

pub fn pattern_of(blocks: &[Block]) -> String {
    blocks.iter().map(|b| b.side.letter()).collect::<Vec<_>>().join(" ")
}

#[derive(Clone, Debug)]
pub struct Factorisation {
    pub blocks: Vec<Block>,
    pub target: Matrix,
    pub word: Option<Vec<Transvection>>,
}

impl Factorisation {
    pub fn new(blocks: Vec<Block>, target: Matrix) -> Self {
        Factorisation { blocks, target, word: None }
    }

    /// Prunes `blocks` before storing them.
    pub fn pruned(blocks: Vec<Block>, target: Matrix) -> Self {
        Self::new(prune(blocks), target)
    }

    /// Builds blocks from matrices laid out in alternating slots starting with `first`.
    pub fn from_slots(first: Side, slots: Vec<Matrix>, target: Matrix) -> Result<Self> {
        let blocks = slots
            .into_iter()
            .enumerate()
            .map(|(k, m)| Block::new(Side::alternate(first, k), m))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::pruned(blocks, target))
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn pattern(&self) -> String {
        pattern_of(&self.blocks)
    }

    pub fn product(&self) -> Matrix {
        let mut m = Matrix::identity(self.target.ring(), self.target.n());
        for b in &self.blocks {
            m = &m * &b.mat;
        }
        m
    }

    pub fn verify(&self) -> VerifyReport {
        verify_factorisation(self)
    }

    /// Verifies and turns a failed report into [`Error::Internal`].
    pub fn checked(self) -> Result<Self> {
        let r = self.verify();
        if r.ok {
            Ok(self)
        } else {
            Err(Error::Internal(r.first_violation.unwrap_or_default()))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub ok: bool,
    pub length: usize,
    pub pattern: String,
    pub first_violation: Option<String>,
}

pub fn verify_factorisation(f: &Factorisation) -> VerifyReport {
    let t = &f.target;
    let violation = (|| {
        let mut prod = Matrix::identity(t.ring(), t.n());
        for (k, b) in f.blocks.iter().enumerate() {
            if !b.mat.ring().same(t.ring()) || b.mat.n() != t.n() {
                return Some(format!("block {} has the wrong ring or size", k + 1));
            }
            if !b.mat.is_unitriangular(b.side) {
                return Some(format!("block {} is not {:?} unitriangular", k + 1, b.side));
            }
            if k > 0 && f.blocks[k - 1].side == b.side {
                return Some(format!("blocks {} and {} are both {:?}", k, k + 1, b.side));
            }
            prod = &prod * &b.mat;
        }
        if &prod != t {
            return Some(format!("product {prod} differs from target {t}"));
        }
        None
    })();
    VerifyReport {
        ok: violation.is_none(),
        length: f.blocks.len(),
        pattern: f.pattern(),
        first_violation: violation,
    }
}
