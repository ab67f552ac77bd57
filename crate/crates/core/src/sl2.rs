//! Length-4 factorisation of `SL(2,R)` over rings of stable rank 1, and the explicit torus
//! and Weyl-element words.
//!
//! For `g = [[a,b],[c,d]]` three column operations reduce `g` to an upper transvection:
//!
//! 1. `g t21(z)` with `c + dz` a unit (the stable-rank witness),
//! 2. `g t12(l)` with `l = c'^{-1}(1-d)`, making the south-east entry 1,
//! 3. `g t21(-c')`, clearing the south-west entry.
//!
//! Moving the multipliers across gives `g = t12(b) t21(c') t12(-l) t21(-z)`.

use crate::error::{Error, Result};
use crate::exactmat::{Factorisation, Matrix, Side, Transvection};
use crate::rings::{sr1_witness, RingElement};

/// Parameters of the three reduction steps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sl2Trace {
    pub z: RingElement,
    pub l: RingElement,
    /// The unit south-west entry after step 1; step 3 multiplies by `t21(-theta)`.
    pub theta: RingElement,
    /// Parameter of the residual upper transvection.
    pub b: RingElement,
}

impl Sl2Trace {
    /// Applies the three steps to `g` and returns the resulting matrix, which should be
    /// `t12(b)`.
    pub fn replay(&self, g: &Matrix) -> Matrix {
        let mut h = g.clone();
        h.col_add(1, 0, &self.z);
        h.col_add(0, 1, &self.l);
        h.col_add(1, 0, &-&self.theta);
        h
    }
}

pub(crate) fn check_sl(g: &Matrix) -> Result<()> {
    let d = g.det();
    if d.is_one() {
        Ok(())
    } else {
        Err(Error::NotSL(d.to_string()))
    }
}

fn check_2x2(g: &Matrix) -> Result<()> {
    if g.n() != 2 {
        return Err(Error::DimensionMismatch(2, g.n()));
    }
    Ok(())
}

/// Unitriangular inputs and the identity need no ring capability.
pub(crate) fn trivial_factorisation(g: &Matrix) -> Option<Factorisation> {
    if g.is_identity() {
        return Some(Factorisation::new(vec![], g.clone()));
    }
    for side in [Side::Upper, Side::Lower] {
        if g.is_unitriangular(side) {
            return Factorisation::from_slots(side, vec![g.clone()], g.clone()).ok();
        }
    }
    None
}

/// The four slot matrices `[t12(b), t21(c'), t12(-l), t21(-z)]` and the trace.
pub fn sl2_slots(g: &Matrix) -> Result<(Vec<Matrix>, Sl2Trace)> {
    check_2x2(g)?;
    check_sl(g)?;
    let ring = g.ring();
    if !ring.has_sr1() {
        return Err(Error::CapabilityMissing(ring.to_string()));
    }
    let (c, d) = (g.get(1, 0), g.get(1, 1));
    let z = sr1_witness(c, d)?;
    let mut h = g.clone();
    h.col_add(1, 0, &z);
    let theta = h.get(1, 0).clone();
    let l = &theta.invert()? * &(&ring.one() - d);
    h.col_add(0, 1, &l);
    h.col_add(1, 0, &-&theta);
    let b = h.get(0, 1).clone();
    debug_assert!(h == t12(&b));
    let slots = vec![t12(&b), t21(&theta), t12(&-&l), t21(&-&z)];
    Ok((slots, Sl2Trace { z, l, theta, b }))
}

fn t12(x: &RingElement) -> Matrix {
    Transvection { i: 0, j: 1, xi: x.clone() }.matrix(2)
}

fn t21(x: &RingElement) -> Matrix {
    Transvection { i: 1, j: 0, xi: x.clone() }.matrix(2)
}

/// `g` as at most 4 alternating blocks fitting the slots `U L U L`.
pub fn factor_sl2(g: &Matrix) -> Result<Factorisation> {
    factor_sl2_traced(g).map(|(f, _)| f)
}

/// As [`factor_sl2`], also returning the step parameters when the general path ran.
pub fn factor_sl2_traced(g: &Matrix) -> Result<(Factorisation, Option<Sl2Trace>)> {
    check_2x2(g)?;
    check_sl(g)?;
    if let Some(f) = trivial_factorisation(g) {
        return Ok((f, None));
    }
    let (slots, trace) = sl2_slots(g)?;
    let f = Factorisation::from_slots(Side::Upper, slots, g.clone())?;
    Ok((f, Some(trace)))
}

/// Mirrored variant fitting the slots `L U L U`: factor `JgJ` and conjugate back.
pub fn factor_sl2_lower_first(g: &Matrix) -> Result<Factorisation> {
    check_2x2(g)?;
    let f = factor_sl2(&g.reversed())?;
    Ok(mirror(&f))
}

/// Conjugates every block and the target by the reversal permutation.
pub fn mirror(f: &Factorisation) -> Factorisation {
    let blocks = f
        .blocks
        .iter()
        .map(|b| crate::exactmat::Block { side: b.side.opposite(), mat: b.mat.reversed() })
        .collect();
    Factorisation::new(blocks, f.target.reversed())
}

fn word_factorisation(first: Side, params: &[RingElement], target: Matrix) -> Result<Factorisation> {
    let slots = params
        .iter()
        .enumerate()
        .map(|(k, x)| match Side::alternate(first, k) {
            Side::Upper => t12(x),
            Side::Lower => t21(x),
        })
        .collect::<Vec<_>>();
    let blocks = slots
        .into_iter()
        .enumerate()
        .map(|(k, m)| crate::exactmat::Block::new(Side::alternate(first, k), m))
        .collect::<Result<Vec<_>>>()?;
    Factorisation::new(blocks, target).checked()
}

/// `diag(eps, eps^-1) = t12(-1) t21(1-eps) t12(eps^-1) t21(eps(eps-1))`.
pub fn torus4(eps: &RingElement) -> Result<Factorisation> {
    let inv = eps.invert()?;
    let r = eps.ring();
    let one = r.one();
    let params = [-&one, &one - eps, inv.clone(), eps * &(eps - &one)];
    word_factorisation(Side::Upper, &params, Matrix::diagonal(r, &[eps.clone(), inv]))
}

/// `diag(eps, eps^-1) = t12(eps) t21(-eps^-1) t12(eps-1) t21(1) t12(-1)`.
pub fn torus5(eps: &RingElement) -> Result<Factorisation> {
    let inv = eps.invert()?;
    let r = eps.ring();
    let one = r.one();
    let params = [eps.clone(), -&inv, eps - &one, one.clone(), -&one];
    word_factorisation(Side::Upper, &params, Matrix::diagonal(r, &[eps.clone(), inv]))
}

/// `w(eps) = [[0, eps], [-eps^-1, 0]] = t12(eps) t21(-eps^-1) t12(eps)`.
pub fn weyl(eps: &RingElement) -> Result<(Matrix, Factorisation)> {
    let inv = eps.invert()?;
    let r = eps.ring();
    let w = Matrix::from_rows(r, vec![vec![r.zero(), eps.clone()], vec![-&inv, r.zero()]])?;
    let f = word_factorisation(Side::Upper, &[eps.clone(), -&inv, eps.clone()], w.clone())?;
    Ok((w, f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::Ring;
    use crate::exactmat::fits_slots;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn m(ring: &Ring, rows: &[&[i64]]) -> Matrix {
        Matrix::from_i64(ring, rows).unwrap()
    }

    fn sl2_elements(r: &Ring) -> Vec<Matrix> {
        let els = r.elements().unwrap();
        let mut out = vec![];
        for a in &els {
            for b in &els {
                for c in &els {
                    for d in &els {
                        if (&(a * d) - &(b * c)).is_one() {
                            out.push(Matrix::from_rows(r, vec![vec![a.clone(), b.clone()], vec![c.clone(), d.clone()]]).unwrap());
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn worked_example_mod_5() {
        let r = Ring::zmod(5).unwrap();
        let g = m(&r, &[&[0, 1], &[4, 0]]);
        let (f, trace) = factor_sl2_traced(&g).unwrap();
        let trace = trace.unwrap();
        assert_eq!(f.pattern(), "U L U");
        assert_eq!(trace.z, r.zero());
        assert_eq!(trace.l, r.from_i64(4));
        assert_eq!(trace.theta, r.from_i64(4));
        assert_eq!(trace.b, r.one());
        let expect = [m(&r, &[&[1, 1], &[0, 1]]), m(&r, &[&[1, 0], &[4, 1]]), m(&r, &[&[1, 1], &[0, 1]])];
        for (b, e) in f.blocks.iter().zip(expect.iter()) {
            assert_eq!(&b.mat, e);
        }
        assert_eq!(trace.replay(&g), m(&r, &[&[1, 1], &[0, 1]]));
    }

    #[test]
    fn degenerate_inputs() {
        let r = Ring::zmod(7).unwrap();
        assert!(factor_sl2(&Matrix::identity(&r, 2)).unwrap().is_empty());
        let f = factor_sl2(&m(&r, &[&[1, 0], &[5, 1]])).unwrap();
        assert_eq!(f.pattern(), "L");
        // unitriangular input over Z needs no stable rank
        let z = Ring::integers();
        assert_eq!(factor_sl2(&m(&z, &[&[1, 1], &[0, 1]])).unwrap().pattern(), "U");
    }

    #[test]
    fn errors() {
        let z = Ring::integers();
        assert!(matches!(factor_sl2(&m(&z, &[&[2, 1], &[1, 1]])), Err(Error::CapabilityMissing(_))));
        let r = Ring::zmod(5).unwrap();
        assert!(matches!(factor_sl2(&m(&r, &[&[2, 0], &[0, 2]])), Err(Error::NotSL(_))));
        assert!(matches!(factor_sl2(&Matrix::identity(&r, 3)), Err(Error::DimensionMismatch(2, 3))));
        assert!(matches!(torus4(&r.zero()), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn exhaustive_small_moduli() {
        for modulus in 2..=9 {
            let r = Ring::zmod(modulus).unwrap();
            for g in sl2_elements(&r) {
                let f = factor_sl2(&g).unwrap();
                assert!(f.verify().ok, "{g:?}");
                assert!(fits_slots(&f.blocks, Side::Upper, 4), "{g:?}: {}", f.pattern());
                let f = factor_sl2_lower_first(&g).unwrap();
                assert!(f.verify().ok);
                assert!(fits_slots(&f.blocks, Side::Lower, 4), "{g:?}: {}", f.pattern());
            }
        }
    }

    #[test]
    fn products_and_fields() {
        for r in [Ring::product(vec![2, 3, 4]).unwrap(), Ring::prime_field(13).unwrap()] {
            let mut rng = ChaCha8Rng::seed_from_u64(11);
            for _ in 0..200 {
                let mut g = Matrix::identity(&r, 2);
                for k in 0..4 {
                    g.col_add(k % 2, 1 - k % 2, &r.sample(&mut rng, 10));
                }
                assert!(factor_sl2(&g).unwrap().verify().ok);
            }
        }
    }

    #[test]
    fn rationals() {
        let q = Ring::rationals();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let a = q.sample(&mut rng, 9);
            if a.is_zero() {
                continue;
            }
            let b = q.sample(&mut rng, 9);
            let c = q.sample(&mut rng, 9);
            // [[a, b], [c, (1 + bc)/a]]
            let d = &(&q.one() + &(&b * &c)) * &a.invert().unwrap();
            let g = Matrix::from_rows(&q, vec![vec![a, b], vec![c, d]]).unwrap();
            let f = factor_sl2(&g).unwrap();
            assert!(f.verify().ok && f.len() <= 4);
        }
    }

    #[test]
    fn torus_examples() {
        let r = Ring::zmod(5).unwrap();
        let f = torus4(&r.from_i64(2)).unwrap();
        let params: Vec<_> = f.blocks.iter().map(|b| if b.side == Side::Upper { b.mat.get(0, 1) } else { b.mat.get(1, 0) }.clone()).collect();
        assert_eq!(params, [4, 4, 3, 2].map(|x| r.from_i64(x)));
        assert_eq!(f.target, m(&r, &[&[2, 0], &[0, 3]]));
        assert_eq!(f.pattern(), "U L U L");

        let f = torus5(&r.from_i64(2)).unwrap();
        let params: Vec<_> = f.blocks.iter().map(|b| if b.side == Side::Upper { b.mat.get(0, 1) } else { b.mat.get(1, 0) }.clone()).collect();
        assert_eq!(params, [2, -3, 1, 1, -1].map(|x| r.from_i64(x)));
        assert_eq!(f.pattern(), "U L U L U");

        assert!(torus4(&r.one()).unwrap().product().is_identity());
        assert!(torus5(&r.one()).unwrap().product().is_identity());

        let q = Ring::rationals();
        let f = torus4(&q.from_i64(2)).unwrap();
        assert_eq!(f.product(), Matrix::diagonal(&q, &[q.from_i64(2), q.parse_element("1/2").unwrap()]));
        let f = torus5(&q.from_i64(-1)).unwrap();
        assert_eq!(f.product(), Matrix::diagonal(&q, &[q.from_i64(-1), q.from_i64(-1)]));
    }

    #[test]
    fn torus_identities_all_units() {
        let r = Ring::zmod(101).unwrap();
        for u in r.units().unwrap() {
            assert!(torus4(&u).unwrap().verify().ok);
            assert!(torus5(&u).unwrap().verify().ok);
        }
    }

    #[test]
    fn weyl_examples() {
        let z = Ring::integers();
        let (w, f) = weyl(&z.one()).unwrap();
        assert_eq!(w, m(&z, &[&[0, 1], &[-1, 0]]));
        assert!(f.verify().ok);
        let z2 = Ring::zmod(2).unwrap();
        assert_eq!(weyl(&z2.one()).unwrap().0, m(&z2, &[&[0, 1], &[1, 0]]));
        let r = Ring::zmod(5).unwrap();
        assert_eq!(weyl(&r.from_i64(2)).unwrap().0, m(&r, &[&[0, 2], &[2, 0]]));
    }

    #[test]
    fn weyl_recovers_torus() {
        let r = Ring::zmod(31).unwrap();
        let w1_inv = weyl(&r.one()).unwrap().0.inverse().unwrap();
        for u in r.units().unwrap() {
            let h = &weyl(&u).unwrap().0 * &w1_inv;
            assert_eq!(h, Matrix::diagonal(&r, &[u.clone(), u.invert().unwrap()]));
        }
        let q = Ring::rationals();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let e = q.from_i64(rng.gen_range(1..40));
            let h = &weyl(&e).unwrap().0 * &weyl(&q.one()).unwrap().0.inverse().unwrap();
            assert!(h.is_diagonal());
        }
    }
}
