//! Oracle checks run by `unitri selftest`.

use serde_json::{json, Value};

use unitri::elimination::{factor5, factor_sl};
use unitri::exactmat::Matrix;
use unitri::monomial::factor_monomial;
use unitri::rings::Ring;
use unitri::shears::{paeth2, toffoli_quick3, EulerAngles};
use unitri::sl2::{torus4, torus5};
use unitri::verify::{commutator3, enumerate_sets, random_sl};
use unitri::zp::{factor_sl2_zp, find_prime_with_primitive_root, DEFAULT_K_MAX};
use unitri::Result;

fn enumeration() -> Result<bool> {
    let mut ok = true;
    for m in 2..=9 {
        let r = Ring::zmod(m)?;
        let rep = enumerate_sets(&r, 2)?;
        ok &= rep.length4_complete;
        if r.units().unwrap_or_default().len() > 1 {
            ok &= rep.sharp && !rep.length3_complete;
        }
    }
    for k in 1..=3 {
        ok &= enumerate_sets(&Ring::product(vec![2; k])?, 2)?.length3_complete;
    }
    Ok(ok)
}

fn worked_examples() -> Result<bool> {
    let r = Ring::zmod(5)?;
    let g = Matrix::from_i64(&r, &[&[0, 1], &[4, 0]])?;
    let f = factor_sl(&g)?;
    let z = Ring::integers();
    let w = Matrix::from_i64(&z, &[&[0, 1], &[-1, 0]])?;
    let zp = Ring::localized(2)?;
    let h = Matrix::from_rows(
        &zp,
        vec![vec![zp.from_i64(1), zp.from_i64(3)], vec![zp.parse_element("1/2")?, zp.parse_element("5/2")?]],
    )?;
    let (fz, tr) = factor_sl2_zp(&h, DEFAULT_K_MAX)?;
    let core = tr.core.as_ref();
    Ok(f.verify().ok
        && f.pattern() == "U L U"
        && factor_monomial(&w)?.pattern() == "U L U"
        && fz.verify().ok
        && core.is_some_and(|c| c.q == 13 && c.u == 4 && c.theta.to_rational().to_string() == "-3/4")
        && find_prime_with_primitive_root(1, 3, 2, DEFAULT_K_MAX)? == (4, 13))
}

fn random_words(seed: u64) -> Result<bool> {
    let mut ok = true;
    for (k, m) in [4u64, 6, 9, 101].into_iter().enumerate() {
        let r = Ring::zmod(m)?;
        for n in 2..=5 {
            for s in 0..10 {
                let (g, _) = random_sl(&r, n, 2 * n * n, seed.wrapping_add(1000 * k as u64 + 10 * n as u64 + s));
                let f = factor_sl(&g)?;
                ok &= f.verify().ok && f.len() <= 4;
                ok &= factor5(&g).map(|f| f.verify().ok && f.len() <= 5)?;
                if n == 2 {
                    ok &= commutator3(&g, &f).is_ok();
                }
            }
        }
    }
    for p in [2, 3, 5, 7] {
        let r = Ring::localized(p)?;
        for s in 0..10 {
            let (g, _) = random_sl(&r, 2, 3, seed.wrapping_add(s));
            let (f, _) = factor_sl2_zp(&g, DEFAULT_K_MAX)?;
            ok &= f.verify().ok && f.len() <= 5;
        }
    }
    Ok(ok)
}

fn tori() -> Result<bool> {
    let r = Ring::zmod(101)?;
    let mut ok = true;
    for u in r.units().unwrap_or_default() {
        let d = Matrix::diagonal(&r, &[u.clone(), u.invert()?]);
        ok &= torus4(&u)?.product() == d && torus5(&u)?.product() == d;
    }
    Ok(ok)
}

fn shears() -> Result<bool> {
    let mut ok = true;
    for i in 0..100 {
        let t = -2.5 + 0.05 * i as f64;
        ok &= paeth2(t)?.max_abs_error <= 1e-12;
        let e = EulerAngles::new(t, 0.6 - t / 3.0, 0.2 * t)?;
        if e.is_regular(0.1) {
            ok &= toffoli_quick3(&e)?.max_abs_error <= 1e-10;
        }
    }
    Ok(ok)
}

type Check = Box<dyn Fn() -> Result<bool>>;

/// Runs every check; returns whether all passed, with a JSON report.
pub fn run(seed: u64) -> (bool, Value) {
    let checks: [(&str, Check); 5] = [
        ("enumeration", Box::new(enumeration)),
        ("worked_examples", Box::new(worked_examples)),
        ("random_words", Box::new(move || random_words(seed))),
        ("tori", Box::new(tori)),
        ("shears", Box::new(shears)),
    ];
    let mut all = true;
    let mut out = Vec::new();
    for (name, check) in checks {
        let (ok, error) = match check() {
            Ok(ok) => (ok, Value::Null),
            Err(e) => (false, json!(e.to_string())),
        };
        all &= ok;
        out.push(json!({"name": name, "ok": ok, "error": error}));
    }
    (all, json!({"ok": all, "seed": seed, "checks": out}))
}
