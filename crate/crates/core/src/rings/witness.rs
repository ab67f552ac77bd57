//! Stable-rank-1 witnesses: given a unimodular pair `(c, d)`, find `z` with `c + d z` a unit.

use num_integer::Integer;

use super::{Ring, RingElement, RingKind, Value};
use crate::error::{Error, Result};

fn check_capability(ring: &Ring) -> Result<()> {
    if ring.has_sr1() {
        Ok(())
    } else {
        Err(Error::CapabilityMissing(ring.to_string()))
    }
}

/// First `z` in `0..m` with `gcd(c + d z, m) = 1`. `m = 1` is the zero ring, where 0 is a unit.
fn scan_residue(c: u64, d: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    (0..m).find(|z| (((c as u128 + d as u128 * *z as u128) % m as u128) as u64).gcd(&m) == 1)
}

/// Right-to-left reduction over `Z/m`: coordinate `i` is fixed by a scalar scan in the
/// quotient `Z/gcd(c_0, …, c_{i-1}, m)`, which keeps `(c_0, …, c_{i-1}, d)` unimodular.
fn vec_residue(c: &[u64], d: u64, m: u64) -> Option<Vec<u64>> {
    let mut z = vec![0u64; c.len()];
    let mut d = d % m;
    for i in (0..c.len()).rev() {
        let g = c[..i].iter().fold(m, |acc, x| acc.gcd(x));
        let zi = scan_residue(d % g, c[i] % g, g)?;
        z[i] = zi;
        d = ((d as u128 + c[i] as u128 * zi as u128) % m as u128) as u64;
    }
    (d.gcd(&m) == 1).then_some(z)
}

fn residues(x: &RingElement) -> Vec<u64> {
    match x.value() {
        Value::Residue(r) => vec![*r],
        Value::Tuple(t) => t.clone(),
        _ => unreachable!("finite ring expected"),
    }
}

fn moduli(ring: &Ring) -> Vec<u64> {
    match ring.kind() {
        RingKind::Zmod(m) | RingKind::PrimeField(m) => vec![*m],
        RingKind::DirectProduct(ms) => ms.clone(),
        _ => unreachable!("finite ring expected"),
    }
}

fn from_residues(ring: &Ring, r: Vec<u64>) -> RingElement {
    let value = match ring.kind() {
        RingKind::DirectProduct(_) => Value::Tuple(r),
        _ => Value::Residue(r[0]),
    };
    RingElement { ring: ring.clone(), value }
}

/// Returns `z` such that `c + d·z` is a unit.
///
/// Over `Z/m` (and componentwise over direct products) this is the first `z = 0, 1, …, m-1`
/// that works. Over fields it is `0` when `c` is already a unit and `1` otherwise.
pub fn sr1_witness(c: &RingElement, d: &RingElement) -> Result<RingElement> {
    c.ring().check(d.ring())?;
    let ring = c.ring();
    check_capability(ring)?;
    let not_unimodular = || Error::NotUnimodular(format!("({c}, {d}) in {ring}"));
    if let RingKind::Rationals = ring.kind() {
        return if c.is_unit() {
            Ok(ring.zero())
        } else if d.is_unit() {
            Ok(ring.one())
        } else {
            Err(not_unimodular())
        };
    }
    let (cs, ds, ms) = (residues(c), residues(d), moduli(ring));
    let mut z = Vec::with_capacity(ms.len());
    for ((c, d), m) in cs.iter().zip(&ds).zip(&ms) {
        if c.gcd(d).gcd(m) != 1 {
            return Err(not_unimodular());
        }
        z.push(scan_residue(*c, *d, *m).ok_or_else(|| Error::Internal("witness scan failed".into()))?);
    }
    Ok(from_residues(ring, z))
}

/// Returns `z_1, …, z_k` such that `d + Σ c_i z_i` is a unit.
///
/// Coordinates are fixed right to left, each by a scalar witness search for the running
/// value of `d` (in the quotient by the ideal of the coordinates still to the left).
pub fn sr1_witness_vec(c: &[RingElement], d: &RingElement) -> Result<Vec<RingElement>> {
    let ring = d.ring();
    for x in c {
        x.ring().check(ring)?;
    }
    check_capability(ring)?;
    let not_unimodular = || {
        let parts: Vec<String> = c.iter().map(|x| x.to_string()).collect();
        Error::NotUnimodular(format!("({}; {d}) in {ring}", parts.join(", ")))
    };
    if let RingKind::Rationals = ring.kind() {
        let mut z = vec![ring.zero(); c.len()];
        if d.is_unit() {
            return Ok(z);
        }
        // the only nontrivial quotient is the field itself, reached once all c_j left of i vanish
        let first = c.iter().position(|x| !x.is_zero()).ok_or_else(not_unimodular)?;
        z[first] = ring.one();
        return Ok(z);
    }
    let ms = moduli(ring);
    let cs: Vec<Vec<u64>> = c.iter().map(residues).collect();
    let ds = residues(d);
    let mut per_component: Vec<Vec<u64>> = Vec::with_capacity(ms.len());
    for (k, m) in ms.iter().enumerate() {
        let col: Vec<u64> = cs.iter().map(|r| r[k]).collect();
        let g = col.iter().fold(ds[k].gcd(m), |acc, x| acc.gcd(x));
        if g != 1 {
            return Err(not_unimodular());
        }
        per_component.push(
            vec_residue(&col, ds[k], *m).ok_or_else(|| Error::Internal("vector witness failed".into()))?,
        );
    }
    Ok((0..c.len())
        .map(|i| from_residues(ring, per_component.iter().map(|zc| zc[i]).collect()))
        .collect())
}
