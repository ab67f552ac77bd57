//! Length-4 factorisation of monomial matrices of determinant 1 over any commutative ring,
//! by induction on the dimension.
//!
//! Each step multiplies `g` on the right by letters from the last row and column so that the
//! last row and column become trivial, then factors the `(n-1)`-dimensional remainder and
//! re-attaches the letters as `Σ`-chunks of the `r = n-1` split.

use crate::error::{Error, Result};
use crate::exactmat::{Factorisation, Matrix, Transvection};
use crate::parabolic::{reinsert, NormalForm, ParabolicSplit, SigmaChunk};
use crate::rings::RingElement;
use crate::sl2::check_sl;

/// A monomial matrix: `units[j]` sits at row `perm[j]` of column `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialMatrix {
    pub perm: Vec<usize>,
    pub units: Vec<RingElement>,
}

impl MonomialMatrix {
    pub fn from_matrix(g: &Matrix) -> Result<Self> {
        let perm = g.monomial_pattern().ok_or(Error::NotMonomial)?;
        let units = perm.iter().enumerate().map(|(j, &i)| g.get(i, j).clone()).collect();
        Ok(MonomialMatrix { perm, units })
    }

    pub fn to_matrix(&self) -> Result<Matrix> {
        let n = self.perm.len();
        let ring = self.units.first().ok_or(Error::DimensionTooSmall(0))?.ring().clone();
        let mut seen = vec![false; n];
        for (&i, u) in self.perm.iter().zip(&self.units) {
            if i >= n || seen[i] || !u.is_unit() {
                return Err(Error::NotMonomial);
            }
            seen[i] = true;
        }
        let mut g = Matrix::zero(&ring, n);
        for (j, (&i, u)) in self.perm.iter().zip(&self.units).enumerate() {
            g.set(i, j, u.clone());
        }
        Ok(g)
    }
}

fn letter(n: usize, i: usize, j: usize, xi: RingElement) -> Matrix {
    Transvection { i, j, xi }.matrix(n)
}

/// Four slots `U L U L` whose product is the monomial matrix `g`.
pub fn monomial_slots(g: &Matrix) -> Result<NormalForm> {
    let perm = g.monomial_pattern().ok_or(Error::NotMonomial)?;
    check_sl(g)?;
    let ring = g.ring().clone();
    let n = g.n();
    if n == 1 {
        return Ok(NormalForm::trivial(&ring, 1, 2));
    }
    let last = n - 1;
    let e = Matrix::identity(&ring, n);
    // column s holds the unit of the last row
    let s = perm.iter().position(|&i| i == last).unwrap();
    let mut h = g.clone();
    let chunks = if s != last {
        // last row and column meet in the minor [[0, a], [b, 0]] on rows (r, n), columns (s, n)
        let b = g.get(last, s).clone();
        let binv = b.invert()?;
        h.col_add(s, last, &binv);
        h.col_add(last, s, &-&b);
        h.col_add(s, last, &binv);
        vec![
            SigmaChunk { v: letter(n, s, last, -&binv), m: letter(n, last, s, b.clone()) },
            SigmaChunk { v: letter(n, s, last, -&binv), m: e.clone() },
        ]
    } else {
        let b = g.get(last, last).clone();
        if b.is_one() {
            vec![SigmaChunk { v: e.clone(), m: e.clone() }, SigmaChunk { v: e.clone(), m: e.clone() }]
        } else {
            // the unit of row 0 pairs with b in the minor [[a, 0], [0, b]]
            let s = (0..last).find(|&j| !g.get(0, j).is_zero()).unwrap();
            let one = ring.one();
            let binv = b.invert()?;
            let c = &binv * &(&one - &b);
            h.col_add(last, s, &binv);
            h.col_add(s, last, &(&one - &b));
            h.col_add(last, s, &-&one);
            h.col_add(s, last, &-&c);
            vec![
                SigmaChunk { v: letter(n, s, last, c), m: letter(n, last, s, one) },
                SigmaChunk { v: letter(n, s, last, &b - &ring.one()), m: letter(n, last, s, -&binv) },
            ]
        }
    };
    let trivial_edge = (0..last).all(|k| h.get(k, last).is_zero() && h.get(last, k).is_zero()) && h.get(last, last).is_one();
    if !trivial_edge || h.monomial_pattern().is_none() {
        return Err(Error::Internal(format!("minor reduction failed: {h}")));
    }
    let sub = monomial_slots(&h.principal(0, last))?;
    let split = ParabolicSplit::new(n, n - 1)?;
    let deltas: Vec<Matrix> = sub.slots().iter().map(|d| d.embed(n, 0)).collect();
    let out = reinsert(&deltas, &chunks, &split)?;
    if out.product() != g {
        return Err(Error::Internal(format!("monomial recombination failed for {g}")));
    }
    Ok(out)
}

/// At most 4 alternating blocks fitting `U L U L`.
pub fn factor_monomial(g: &Matrix) -> Result<Factorisation> {
    monomial_slots(g)?.to_factorisation()?.checked()
}

/// `diag(d)` with unit entries of product 1.
pub fn factor_torus(d: &[RingElement]) -> Result<Factorisation> {
    let first = d.first().ok_or(Error::DimensionTooSmall(0))?;
    let ring = first.ring();
    let mut prod = ring.one();
    for x in d {
        if !x.is_unit() {
            return Err(Error::NotAUnit(x.to_string()));
        }
        prod = &prod * x;
    }
    if !prod.is_one() {
        return Err(Error::DetNotOne(prod.to_string()));
    }
    factor_monomial(&Matrix::diagonal(ring, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmat::{fits_slots, Side};
    use crate::rings::Ring;
    use crate::sl2::torus4;

    fn m(ring: &Ring, rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64(ring, rows).unwrap()
    }

    #[test]
    fn weyl_over_integers() {
        let z = Ring::integers();
        let g = m(&z, &[&[0, 1], &[-1, 0]]);
        let f = factor_monomial(&g).unwrap();
        assert_eq!(f.pattern(), "U L U");
        let expect = [m(&z, &[&[1, 1], &[0, 1]]), m(&z, &[&[1, 0], &[-1, 1]]), m(&z, &[&[1, 1], &[0, 1]])];
        for (b, e) in f.blocks.iter().zip(expect.iter()) {
            assert_eq!(&b.mat, e);
        }
    }

    #[test]
    fn examples() {
        let z = Ring::integers();
        assert!(factor_monomial(&Matrix::identity(&z, 4)).unwrap().is_empty());
        let cycle = m(&z, &[&[0, 0, 1], &[1, 0, 0], &[0, 1, 0]]);
        let f = factor_monomial(&cycle).unwrap();
        assert!(f.verify().ok && f.len() <= 4);
        assert!(matches!(factor_monomial(&m(&z, &[&[1, 1], &[0, 1]])), Err(Error::NotMonomial)));
        assert!(matches!(factor_monomial(&m(&z, &[&[0, 1], &[1, 0]])), Err(Error::NotSL(_))));
    }

    #[test]
    fn torus_examples() {
        let r = Ring::zmod(5).unwrap();
        let d = [r.from_i64(2), r.from_i64(3)];
        let f = factor_torus(&d).unwrap();
        assert!(f.verify().ok);
        assert_eq!(f.product(), torus4(&d[0]).unwrap().product());
        assert!(factor_torus(&[r.one(), r.one(), r.one()]).unwrap().is_empty());
        let r7 = Ring::zmod(7).unwrap();
        let f = factor_torus(&[r7.from_i64(2), r7.from_i64(2), r7.from_i64(2)]).unwrap();
        assert!(f.verify().ok && f.len() <= 4);
        assert!(matches!(factor_torus(&[r.from_i64(2), r.from_i64(2)]), Err(Error::DetNotOne(_))));
        assert!(matches!(factor_torus(&[r.zero(), r.one()]), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn monomial_matrix_round_trip() {
        let z = Ring::integers();
        let g = m(&z, &[&[0, -1, 0], &[0, 0, 1], &[1, 0, 0]]);
        let mm = MonomialMatrix::from_matrix(&g).unwrap();
        assert_eq!(mm.perm, vec![2, 0, 1]);
        assert_eq!(mm.to_matrix().unwrap(), g);
    }

    #[test]
    fn all_diagonal_tori_small() {
        for modulus in 2..=9u64 {
            let r = Ring::zmod(modulus).unwrap();
            let units = r.units().unwrap();
            for n in 2..=3 {
                let mut stack: Vec<Vec<RingElement>> = vec![vec![]];
                while let Some(d) = stack.pop() {
                    if d.len() == n - 1 {
                        let prod = d.iter().fold(r.one(), |a, x| &a * x);
                        let mut d = d.clone();
                        d.push(prod.invert().unwrap());
                        let f = factor_torus(&d).unwrap();
                        assert!(f.verify().ok && fits_slots(&f.blocks, Side::Upper, 4));
                        continue;
                    }
                    for u in &units {
                        let mut e = d.clone();
                        e.push(u.clone());
                        stack.push(e);
                    }
                }
            }
        }
    }
}
