//! End-to-end acceptance suite. Each criterion prints one PASS/FAIL line with its runtime.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use unitri::elimination::{factor5, factor_sl, gauss};
use unitri::exactmat::{fits_slots, Factorisation, Matrix, Side};
use unitri::monomial::factor_monomial;
use unitri::rings::{Ring, RingElement};
use unitri::shears::{euler3, paeth2, toffoli_quick3, EulerAngles};
use unitri::sl2::{torus4, torus5};
use unitri::verify::{commutator3, enumerate_sets, random_sl};
use unitri::zp::numtheory::{discrete_log, find_prime_with_primitive_root, is_primitive_root, pow_mod};
use unitri::zp::{factor_sl2_zp, ZpCase, DEFAULT_K_MAX};

fn sl2_all(m: u64) -> Vec<Matrix> {
    let r = Ring::zmod(m).unwrap();
    let m = m as i64;
    let mut out = Vec::new();
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    if (a * d - b * c).rem_euclid(m) == 1 % m {
                        out.push(Matrix::from_i64(&r, &[&[a, b], &[c, d]]).unwrap());
                    }
                }
            }
        }
    }
    out
}

fn exact(f: &Factorisation, g: &Matrix, max_len: usize) {
    let rep = f.verify();
    assert!(rep.ok, "{:?}", rep.first_violation);
    assert_eq!(&f.product(), g);
    assert_eq!(&f.target, g);
    assert!(f.len() <= max_len, "{} blocks: {}", f.len(), f.pattern());
}

fn criterion_1() {
    for m in 2..=9 {
        let all = sl2_all(m);
        for g in &all {
            exact(&factor_sl(g).unwrap(), g, 4);
        }
        let rep = enumerate_sets(&Ring::zmod(m).unwrap(), 2).unwrap();
        assert!(rep.length4_complete, "m = {m}");
        assert_eq!(rep.sl, all.len());
    }
}

fn criterion_2() {
    for m in 2..=9u64 {
        let r = Ring::zmod(m).unwrap();
        if r.units().unwrap().len() < 2 {
            continue;
        }
        let rep = enumerate_sets(&r, 2).unwrap();
        assert!(rep.sharp, "m = {m}");
        assert_eq!(rep.ulu_torus, 1);
        assert!(!rep.length3_complete && rep.ulu < rep.sl, "m = {m}");
    }
}

fn criterion_3() {
    for k in 1..=3 {
        let r = Ring::product(vec![2; k]).unwrap();
        let rep = enumerate_sets(&r, 2).unwrap();
        assert!(rep.length3_complete, "k = {k}");
    }
}

fn criterion_4() {
    for n in 3..=5 {
        for m in [4u64, 6, 9, 101] {
            let r = Ring::zmod(m).unwrap();
            for seed in 0..200 {
                let (g, _) = random_sl(&r, n, 2 * n * n, seed);
                let f = factor_sl(&g).unwrap();
                exact(&f, &g, 4);
                assert!(fits_slots(&f.blocks, Side::Upper, 4));
            }
        }
    }
}

fn signed_permutations(n: usize) -> Vec<Matrix> {
    let z = Ring::integers();
    let mut perms: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        perms = perms
            .into_iter()
            .flat_map(|p| {
                (0..n).filter(|i| !p.contains(i)).map(|i| [p.clone(), vec![i]].concat()).collect::<Vec<_>>()
            })
            .collect();
    }
    let mut out = Vec::new();
    for p in &perms {
        for signs in 0..1u32 << n {
            let mut g = Matrix::zero(&z, n);
            for (j, &i) in p.iter().enumerate() {
                g.set(i, j, z.from_i64(if signs >> j & 1 == 1 { -1 } else { 1 }));
            }
            if g.det().is_one() {
                out.push(g);
            }
        }
    }
    out
}

fn criterion_5() {
    let expected = [1, 4, 24, 192, 1920];
    for n in 1..=5 {
        let all = signed_permutations(n);
        assert_eq!(all.len(), expected[n - 1]);
        for g in &all {
            let f = factor_monomial(g).unwrap();
            exact(&f, g, 4);
            assert!(fits_slots(&f.blocks, Side::Upper, 4));
        }
    }
}

fn check_torus(eps: &RingElement) {
    let r = eps.ring();
    let d = Matrix::diagonal(r, &[eps.clone(), eps.invert().unwrap()]);
    let f4 = torus4(eps).unwrap();
    exact(&f4, &d, 4);
    let f5 = torus5(eps).unwrap();
    exact(&f5, &d, 5);
}

fn criterion_6() {
    let r = Ring::zmod(101).unwrap();
    for u in r.units().unwrap() {
        check_torus(&u);
    }
    let q = Ring::rationals();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..100 {
        let a: i64 = rng.gen_range(1..10_000) * if rng.gen_bool(0.5) { 1 } else { -1 };
        let b: i64 = rng.gen_range(1..10_000);
        check_torus(&q.parse_element(&format!("{a}/{b}")).unwrap());
    }
}

fn criterion_7() {
    let moduli = [2u64, 3, 4, 5, 6, 7, 8, 9, 10, 12, 101];
    for seed in 0..500u64 {
        let n = 2 + (seed % 3) as usize;
        let r = Ring::zmod(moduli[(seed as usize / 3) % moduli.len()]).unwrap();
        let (g, _) = random_sl(&r, n, 3 * n * n, 7_000 + seed);
        let gd = gauss(&g).unwrap();
        assert_eq!(gd.product(), g);
        assert!(gd.u.mat.is_upper_unitriangular() && gd.u2.mat.is_upper_unitriangular());
        assert!(gd.v.mat.is_lower_unitriangular());
        assert!(gd.t.is_diagonal() && gd.t.det().is_one());
        let f = factor5(&g).unwrap();
        exact(&f, &g, 5);
        assert!(fits_slots(&f.blocks, Side::Upper, 5));
    }
}

fn criterion_8() {
    for p in [2u64, 3, 5, 7] {
        let r = Ring::localized(p).unwrap();
        for seed in 0..50 {
            let (g, _) = random_sl(&r, 2, 3, seed);
            let (f, tr) = factor_sl2_zp(&g, DEFAULT_K_MAX).unwrap();
            exact(&f, &g, 5);
            let first = match tr.case {
                ZpCase::One => Side::Lower,
                ZpCase::Two => Side::Upper,
                ZpCase::Degenerate => Side::Upper,
            };
            assert!(fits_slots(&f.blocks, first, 5), "p = {p}, seed = {seed}: {}", f.pattern());
            if let Some(c) = &tr.core {
                assert!(c.q > 2);
            }
        }
    }
    let r = Ring::localized(2).unwrap();
    let half = r.parse_element("1/2").unwrap();
    let g = Matrix::from_rows(
        &r,
        vec![vec![r.from_i64(1), r.from_i64(3)], vec![half, r.parse_element("5/2").unwrap()]],
    )
    .unwrap();
    let (f, tr) = factor_sl2_zp(&g, DEFAULT_K_MAX).unwrap();
    exact(&f, &g, 5);
    assert_eq!(tr.case, ZpCase::One);
    let c = tr.core.unwrap();
    assert_eq!(c.k.to_integer().unwrap(), 4.into());
    assert_eq!((c.q, c.u), (13, 4));
    assert_eq!(c.l, 1.into());
    assert_eq!(c.theta.to_rational().to_string(), "-3/4");
    assert_eq!(f.pattern(), "L U L U L");
}

fn criterion_9() {
    assert_eq!(find_prime_with_primitive_root(1, 3, 2, 1_000_000).unwrap(), (4, 13));
    assert!(is_primitive_root(2, 13).unwrap());
    assert!(!is_primitive_root(2, 7).unwrap());
    assert!(is_primitive_root(3, 7).unwrap());
    for q in [13u64, 101, 1019] {
        for b in 1..q {
            let u = discrete_log(2, b, q).unwrap();
            assert!(u >= 1 && u < q);
            assert_eq!(pow_mod(2, u, q), b);
        }
    }
}

fn criterion_10() {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut done = 0;
    while done < 1000 {
        let phi: f64 = rng.gen_range(-4.0..4.0);
        if (phi / 2.0).cos().abs() <= 0.1 {
            continue;
        }
        assert!(paeth2(phi).unwrap().max_abs_error <= 1e-12, "phi = {phi}");
        done += 1;
    }
    done = 0;
    let pi = std::f64::consts::PI;
    while done < 1000 {
        let e = EulerAngles::new(rng.gen_range(-pi..pi), rng.gen_range(-pi..pi), rng.gen_range(-pi..pi)).unwrap();
        if !e.is_regular(0.1) {
            continue;
        }
        let d = toffoli_quick3(&e).unwrap();
        assert!(d.max_abs_error <= 1e-10, "{e:?}");
        let g = euler3(&e);
        assert!((g.transpose() * &g - DMatrix::<f64>::identity(3, 3)).amax() <= 1e-12);
        done += 1;
    }
}

fn criterion_11() {
    for m in 2..=9 {
        for g in sl2_all(m) {
            let f = factor_sl(&g).unwrap();
            let c = commutator3(&g, &f).unwrap();
            assert_eq!(&(&c.commutator * &c.upper.mat) * &c.lower.mat, g);
        }
    }
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn(), u64); 11] = [
        ("1 length 4 over Z/m, exhaustive", criterion_1, 30),
        ("2 sharpness of length 3", criterion_2, 10),
        ("3 Boolean rings, length 3", criterion_3, 10),
        ("4 rank reduction, random words", criterion_4, 120),
        ("5 signed permutations over Z", criterion_5, 30),
        ("6 torus identities", criterion_6, 5),
        ("7 Gauss decomposition and length 5", criterion_7, 60),
        ("8 SL(2, Z[1/p]), length 5", criterion_8, 120),
        ("9 prime search and discrete logs", criterion_9, 5),
        ("10 real shears", criterion_10, 10),
        ("11 commutator decomposition", criterion_11, 10),
    ];
    let mut failed = Vec::new();
    let mut out = std::io::stdout();
    for (name, run, limit) in criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(run));
        let took = start.elapsed();
        let status = match &result {
            Ok(()) if took <= Duration::from_secs(limit) => "PASS",
            _ => "FAIL",
        };
        let note = if result.is_ok() && status == "FAIL" { format!(" (over {limit} s)") } else { String::new() };
        // bypasses the harness capture so the lines land in the test log
        writeln!(out, "criterion {name}: {status} [{:.2} s]{note}", took.as_secs_f64()).unwrap();
        if status == "FAIL" {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed: {failed:?}");
}
