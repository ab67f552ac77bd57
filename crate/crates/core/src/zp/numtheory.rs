//! Primality, factoring, primitive roots and discrete logarithms on `u64`.

use std::collections::HashMap;

use num_integer::Integer;

use crate::error::{Error, Result};

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic for all `u64`.
pub fn is_prime(q: u64) -> bool {
    q >= 2 && primal_check::miller_rabin(q)
}

/// Pollard's rho with Floyd cycle detection; `n` odd composite.
fn rho(n: u64) -> u64 {
    for c in 1.. {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

fn factor_into(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho(n);
    factor_into(d, out);
    factor_into(n / d, out);
}

/// Prime factors of `m` with multiplicity, ascending.
pub fn factorize(m: u64) -> Result<Vec<u64>> {
    if m < 2 {
        return Err(Error::OutOfRange(format!("factorize needs m >= 2, got {m}")));
    }
    let mut out = vec![];
    let mut m = m;
    for p in [2u64, 3, 5, 7, 11, 13] {
        while m % p == 0 {
            out.push(p);
            m /= p;
        }
    }
    factor_into(m, &mut out);
    out.sort_unstable();
    Ok(out)
}

/// Whether `p` generates `(Z/q)^*`.
pub fn is_primitive_root(p: u64, q: u64) -> Result<bool> {
    if !is_prime(q) {
        return Err(Error::OutOfRange(format!("{q} is not prime")));
    }
    if p % q == 0 {
        return Err(Error::OutOfRange(format!("{q} divides {p}")));
    }
    if q == 2 {
        return Ok(true);
    }
    let mut ls = factorize(q - 1)?;
    ls.dedup();
    Ok(ls.iter().all(|l| pow_mod(p, (q - 1) / l, q) != 1))
}

/// Smallest `u` in `[1, q-1]` with `p^u ≡ b (mod q)`, by baby-step giant-step.
pub fn discrete_log(p: u64, b: u64, q: u64) -> Result<u64> {
    if !is_prime(q) {
        return Err(Error::OutOfRange(format!("{q} is not prime")));
    }
    let none = || Error::NoSolution(format!("{b} is not a power of {p} mod {q}"));
    let (p, b) = (p % q, b % q);
    if p == 0 || b == 0 {
        return Err(none());
    }
    let order = q - 1;
    let m = (order as f64).sqrt().ceil() as u64 + 1;
    let mut table: HashMap<u64, u64> = HashMap::with_capacity(m as usize);
    let mut cur = 1u64;
    for j in 0..m {
        table.entry(cur).or_insert(j);
        cur = mul_mod(cur, p, q);
    }
    // giant step p^{-m}
    let step = pow_mod(pow_mod(p, m, q), q - 2, q);
    let mut gamma = b;
    let mut found = None;
    for i in 0..=m {
        if let Some(&j) = table.get(&gamma) {
            found = Some(i * m + j);
            break;
        }
        gamma = mul_mod(gamma, step, q);
    }
    let u = found.ok_or_else(none)?;
    if u > 0 {
        return Ok(u);
    }
    // b ≡ 1: the answer is the multiplicative order of p
    let mut ord = order;
    let mut ls = if order >= 2 { factorize(order)? } else { vec![] };
    ls.dedup();
    for l in ls {
        while ord % l == 0 && pow_mod(p, ord / l, q) == 1 {
            ord /= l;
        }
    }
    Ok(ord)
}

/// The `k` in `1..=k_max`, ascending, with `q = c + d k` prime, `q > 2`, `q != p`, `q ∤ d`,
/// and `p` a primitive root mod `q`, paired with `q`.
pub fn prime_candidates(c: i128, d: i128, p: u64, k_max: u64) -> impl Iterator<Item = Result<(u64, u64)>> {
    (1..=k_max).filter_map(move |k| {
        let q = c + d * k as i128;
        if q <= 2 || q == p as i128 || (d != 0 && d % q == 0) {
            return None;
        }
        let q = match u64::try_from(q) {
            Ok(q) => q,
            Err(_) => return Some(Err(Error::OutOfRange(format!("candidate {q} exceeds 64 bits")))),
        };
        if !is_prime(q) {
            return None;
        }
        match is_primitive_root(p, q) {
            Ok(true) => Some(Ok((k, q))),
            Ok(false) => None,
            Err(e) => Some(Err(e)),
        }
    })
}

/// Smallest `k` in `1..=k_max` with `q = c + d k` prime, `q > 2`, `q != p`, `q ∤ d`, and `p`
/// a primitive root mod `q`.
pub fn find_prime_with_primitive_root(c: i128, d: i128, p: u64, k_max: u64) -> Result<(u64, u64)> {
    prime_candidates(c, d, p, k_max).next().unwrap_or(Err(Error::SearchExhausted(k_max)))
}
