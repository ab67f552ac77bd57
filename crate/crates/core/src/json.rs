//! JSON encodings of rings, elements, matrices, factorisations and reports.
//!
//! Transvection indices are 1-based here and 0-based everywhere else.

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::elimination::Gauss;
use crate::error::{Error, Result};
use crate::exactmat::{Block, Factorisation, Matrix, Side, Transvection, VerifyReport};
use crate::monomial::MonomialMatrix;
use crate::rings::{LocalizedInteger, Ring, RingElement, RingKind};
use crate::shears::ShearDecomposition;
use crate::sl2::Sl2Trace;
use crate::verify::{CommutatorDecomposition, EnumerationReport};
use crate::zp::{CoreTrace, ZpCase, ZpTrace};

fn parse_u64(s: &str, what: &str) -> Result<u64> {
    s.trim().parse().map_err(|_| Error::InvalidDescriptor(format!("bad {what} `{s}`")))
}

/// Command-line ring syntax: `zmod:m`, `gf:p`, `q`, `z`, `zp:p`, `product:zmod:2,zmod:3`.
pub fn ring_from_arg(s: &str) -> Result<Ring> {
    let s = s.trim();
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    match head {
        "zmod" => Ring::zmod(parse_u64(rest, "modulus")?),
        "gf" => Ring::prime_field(parse_u64(rest, "prime")?),
        "zp" => Ring::localized(parse_u64(rest, "prime")?),
        "q" if rest.is_empty() => Ok(Ring::rationals()),
        "z" if rest.is_empty() => Ok(Ring::integers()),
        "product" => {
            let ms = rest
                .split(',')
                .map(|f| match f.trim().split_once(':') {
                    Some(("zmod", m)) => parse_u64(m, "modulus"),
                    _ => Err(Error::InvalidDescriptor(format!("product factor `{f}` is not zmod:m"))),
                })
                .collect::<Result<Vec<_>>>()?;
            Ring::product(ms)
        }
        _ => Err(Error::InvalidDescriptor(format!("unknown ring `{s}`"))),
    }
}

pub fn ring_to_json(r: &Ring) -> Value {
    match r.kind() {
        RingKind::Zmod(m) => json!({"ring": "zmod", "m": m}),
        RingKind::PrimeField(p) => json!({"ring": "gf", "p": p}),
        RingKind::Rationals => json!({"ring": "q"}),
        RingKind::Integers => json!({"ring": "z"}),
        RingKind::LocalizedIntegers(p) => json!({"ring": "zp", "p": p}),
        RingKind::DirectProduct(ms) => {
            json!({"ring": "product", "factors": ms.iter().map(|m| json!({"ring": "zmod", "m": m})).collect::<Vec<_>>()})
        }
    }
}

fn field_u64(v: &Value, key: &str) -> Result<u64> {
    v.get(key).and_then(Value::as_u64).ok_or_else(|| Error::InvalidDescriptor(format!("missing integer `{key}` in {v}")))
}

pub fn ring_from_json(v: &Value) -> Result<Ring> {
    if let Some(s) = v.as_str() {
        return ring_from_arg(s);
    }
    let bad = || Error::InvalidDescriptor(v.to_string());
    match v.get("ring").and_then(Value::as_str).ok_or_else(bad)? {
        "zmod" => Ring::zmod(field_u64(v, "m")?),
        "gf" => Ring::prime_field(field_u64(v, "p")?),
        "zp" => Ring::localized(field_u64(v, "p")?),
        "q" => Ok(Ring::rationals()),
        "z" => Ok(Ring::integers()),
        "product" => {
            let fs = v.get("factors").and_then(Value::as_array).ok_or_else(bad)?;
            let ms = fs
                .iter()
                .map(|f| match ring_from_json(f)?.kind() {
                    RingKind::Zmod(m) => Ok(*m),
                    _ => Err(bad()),
                })
                .collect::<Result<Vec<_>>>()?;
            Ring::product(ms)
        }
        _ => Err(bad()),
    }
}

pub fn element_to_json(x: &RingElement) -> Value {
    match x.as_localized() {
        Some(l) => json!({"a": l.unit_part().to_string(), "v": l.valuation()}),
        None => Value::String(x.to_string()),
    }
}

pub fn element_from_json(ring: &Ring, v: &Value) -> Result<RingElement> {
    let bad = || Error::Parse(format!("{v} is not an element of {ring}"));
    match v {
        Value::String(s) => ring.parse_element(s),
        Value::Number(n) if n.is_i64() || n.is_u64() => ring.parse_element(&n.to_string()),
        Value::Object(o) => {
            let p = ring.localized_prime().ok_or_else(bad)?;
            let a: BigInt = match o.get("a") {
                Some(Value::String(s)) => s.trim().parse().map_err(|_| bad())?,
                Some(Value::Number(n)) => n.to_string().parse().map_err(|_| bad())?,
                _ => return Err(bad()),
            };
            let e = o.get("v").and_then(Value::as_i64).ok_or_else(bad)?;
            ring.localized_element(LocalizedInteger::new(a, e, p))
        }
        Value::Array(parts) => {
            let rs = parts
                .iter()
                .map(|p| p.as_i64().map(BigInt::from).ok_or_else(bad))
                .collect::<Result<Vec<_>>>()?;
            ring.tuple_element(&rs)
        }
        _ => Err(bad()),
    }
}

pub fn matrix_to_json(m: &Matrix) -> Value {
    let entries: Vec<Vec<Value>> = m.rows().iter().map(|r| r.iter().map(element_to_json).collect()).collect();
    json!({"n": m.n(), "ring": ring_to_json(m.ring()), "entries": entries})
}

/// Accepts a bare array of rows or `{"n", "ring", "entries"}`; in the latter form the ring must
/// match `ring` when given.
pub fn matrix_from_json(v: &Value, ring: Option<&Ring>) -> Result<Matrix> {
    let (rows, ring) = match v {
        Value::Array(rows) => (rows, ring.cloned().ok_or_else(|| Error::Parse("a bare matrix needs a ring".into()))?),
        Value::Object(o) => {
            let own = o.get("ring").map(ring_from_json).transpose()?;
            let ring = match (own, ring) {
                (Some(a), Some(b)) if &a != b => return Err(Error::DescriptorMismatch(a.to_string(), b.to_string())),
                (Some(a), _) => a,
                (None, Some(b)) => b.clone(),
                (None, None) => return Err(Error::Parse("matrix without a ring".into())),
            };
            let rows = o.get("entries").and_then(Value::as_array).ok_or_else(|| Error::Parse("missing `entries`".into()))?;
            (rows, ring)
        }
        _ => return Err(Error::Parse(format!("expected a matrix, got {v}"))),
    };
    let mut out = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let row = row.as_array().ok_or_else(|| Error::Parse(format!("row {} is not an array", i + 1)))?;
        let mut parsed = Vec::with_capacity(row.len());
        for (j, x) in row.iter().enumerate() {
            let e = element_from_json(&ring, x).map_err(|e| Error::Parse(format!("entry ({}, {}): {e}", i + 1, j + 1)))?;
            parsed.push(e);
        }
        out.push(parsed);
    }
    if let Some(n) = v.get("n").and_then(Value::as_u64) {
        if n as usize != out.len() {
            return Err(Error::DimensionMismatch(n as usize, out.len()));
        }
    }
    Matrix::from_rows(&ring, out)
}

/// Parses matrix text as in `--matrix '[[0,1],[4,0]]'`.
pub fn parse_matrix(text: &str, ring: &Ring) -> Result<Matrix> {
    let v: Value = serde_json::from_str(text).map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
    matrix_from_json(&v, Some(ring))
}

pub fn transvection_to_json(t: &Transvection) -> Value {
    json!({"i": t.i + 1, "j": t.j + 1, "xi": element_to_json(&t.xi)})
}

pub fn transvection_from_json(v: &Value, ring: &Ring) -> Result<Transvection> {
    let idx = |k: &str| {
        v.get(k)
            .and_then(Value::as_u64)
            .filter(|&x| x >= 1)
            .map(|x| x as usize - 1)
            .ok_or_else(|| Error::Parse(format!("bad 1-based index `{k}` in {v}")))
    };
    let xi = element_from_json(ring, v.get("xi").ok_or_else(|| Error::Parse(format!("missing `xi` in {v}")))?)?;
    Transvection::new(idx("i")?, idx("j")?, xi)
}

pub fn factorisation_to_json(f: &Factorisation) -> Value {
    let mut o = Map::new();
    o.insert("pattern".into(), json!(f.pattern()));
    o.insert("blocks".into(), Value::Array(f.blocks.iter().map(|b| matrix_to_json(&b.mat)).collect()));
    o.insert("target".into(), matrix_to_json(&f.target));
    if let Some(w) = &f.word {
        o.insert("word".into(), Value::Array(w.iter().map(transvection_to_json).collect()));
    }
    Value::Object(o)
}

/// Block sides are read off the matrices; identity blocks take the side that keeps the
/// pattern alternating, or the side named in `pattern` when present.
pub fn factorisation_from_json(v: &Value) -> Result<Factorisation> {
    let target = matrix_from_json(v.get("target").ok_or_else(|| Error::Parse("missing `target`".into()))?, None)?;
    let ring = target.ring().clone();
    let letters: Vec<String> = v
        .get("pattern")
        .and_then(Value::as_str)
        .map(|p| p.split_whitespace().map(str::to_string).collect())
        .unwrap_or_default();
    let raw = v.get("blocks").and_then(Value::as_array).ok_or_else(|| Error::Parse("missing `blocks`".into()))?;
    let mut blocks: Vec<Block> = Vec::with_capacity(raw.len());
    for (k, b) in raw.iter().enumerate() {
        let m = matrix_from_json(b, Some(&ring))?;
        let side = match letters.get(k).map(String::as_str) {
            Some("U") => Side::Upper,
            Some("L") => Side::Lower,
            _ if m.is_upper_unitriangular() && !m.is_identity() => Side::Upper,
            _ if m.is_lower_unitriangular() && !m.is_identity() => Side::Lower,
            _ => blocks.last().map(|b| b.side.opposite()).unwrap_or(Side::Upper),
        };
        blocks.push(Block::new(side, m)?);
    }
    let mut f = Factorisation::new(blocks, target);
    if let Some(w) = v.get("word").and_then(Value::as_array) {
        f.word = Some(w.iter().map(|t| transvection_from_json(t, &ring)).collect::<Result<_>>()?);
    }
    Ok(f)
}

pub fn verify_report_to_json(r: &VerifyReport) -> Value {
    json!({"ok": r.ok, "length": r.length, "pattern": r.pattern, "first_violation": r.first_violation})
}

pub fn sl2_trace_to_json(t: &Sl2Trace) -> Value {
    json!({
        "z": element_to_json(&t.z),
        "l": element_to_json(&t.l),
        "theta": element_to_json(&t.theta),
        "b": element_to_json(&t.b),
    })
}

fn localized_to_json(x: &LocalizedInteger) -> Value {
    json!({"a": x.unit_part().to_string(), "v": x.valuation()})
}

fn core_to_json(c: &CoreTrace) -> Map<String, Value> {
    let mut o = Map::new();
    o.insert("alpha".into(), json!(c.alpha));
    o.insert("beta".into(), json!(c.beta));
    // k is an integer for the worked instances; the general value is k0 * p^(mu - beta)
    o.insert("k".into(), c.k.to_integer().map(|k| json!(k.to_string())).unwrap_or_else(|| localized_to_json(&c.k)));
    o.insert("q".into(), json!(c.q));
    o.insert("u".into(), json!(c.u));
    o.insert("l".into(), json!(c.l.to_string()));
    o.insert("theta".into(), json!(c.theta.to_rational().to_string()));
    o.insert("m".into(), json!(c.m.to_rational().to_string()));
    o
}

pub fn zp_trace_to_json(t: &ZpTrace) -> Value {
    let case = match t.case {
        ZpCase::One => json!(1),
        ZpCase::Two => json!(2),
        ZpCase::Degenerate => json!("degenerate"),
    };
    let mut o = t.core.as_ref().map(core_to_json).unwrap_or_default();
    o.insert("case".into(), case);
    Value::Object(o)
}

pub fn monomial_to_json(m: &MonomialMatrix) -> Value {
    json!({
        "perm": m.perm.iter().map(|i| i + 1).collect::<Vec<_>>(),
        "units": m.units.iter().map(element_to_json).collect::<Vec<_>>(),
    })
}

pub fn monomial_from_json(v: &Value, ring: &Ring) -> Result<MonomialMatrix> {
    let bad = || Error::Parse(format!("bad monomial matrix {v}"));
    let perm = v
        .get("perm")
        .and_then(Value::as_array)
        .ok_or_else(bad)?
        .iter()
        .map(|x| x.as_u64().filter(|&i| i >= 1).map(|i| i as usize - 1).ok_or_else(bad))
        .collect::<Result<Vec<_>>>()?;
    let units = v
        .get("units")
        .and_then(Value::as_array)
        .ok_or_else(bad)?
        .iter()
        .map(|x| element_from_json(ring, x))
        .collect::<Result<Vec<_>>>()?;
    if perm.len() != units.len() {
        return Err(bad());
    }
    Ok(MonomialMatrix { perm, units })
}

pub fn gauss_to_json(g: &Gauss) -> Value {
    json!({
        "u": matrix_to_json(&g.u.mat),
        "t": matrix_to_json(&g.t),
        "v": matrix_to_json(&g.v.mat),
        "u2": matrix_to_json(&g.u2.mat),
    })
}

pub fn commutator_to_json(c: &CommutatorDecomposition) -> Value {
    json!({
        "commutator": matrix_to_json(&c.commutator),
        "ux": matrix_to_json(&c.ux),
        "uv": matrix_to_json(&c.uv),
        "upper": matrix_to_json(&c.upper.mat),
        "lower": matrix_to_json(&c.lower.mat),
    })
}

pub fn enumeration_to_json(r: &EnumerationReport) -> Value {
    json!({
        "ring": ring_to_json(&r.ring),
        "n": r.n,
        "sl": r.sl,
        "ulu": r.ulu,
        "ulul": r.ulul,
        "torus": r.torus,
        "ulu_torus": r.ulu_torus,
        "ulul_torus": r.ulul_torus,
        "length4_complete": r.length4_complete,
        "length3_complete": r.length3_complete,
        "sharp": r.sharp,
    })
}

pub fn shear_to_json(d: &ShearDecomposition) -> Value {
    let real = |m: &nalgebra::DMatrix<f64>| -> Vec<Vec<f64>> { (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect() };
    json!({
        "pattern": d.pattern(),
        "factors": d.factors.iter().map(|(_, m)| real(m)).collect::<Vec<_>>(),
        "target": real(&d.target),
        "max_abs_error": d.max_abs_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::elimination::factor_sl;
    use crate::sl2::factor_sl2;
    use crate::verify::random_sl;
    use crate::zp::{factor_sl2_zp, DEFAULT_K_MAX};

    #[test]
    fn ring_descriptors_round_trip() {
        for s in ["zmod:6", "gf:5", "q", "z", "zp:2", "product:zmod:2,zmod:2"] {
            let r = ring_from_arg(s).unwrap();
            assert_eq!(ring_from_json(&ring_to_json(&r)).unwrap(), r);
        }
        assert_eq!(ring_to_json(&Ring::zmod(6).unwrap()), json!({"ring": "zmod", "m": 6}));
        assert_eq!(
            ring_to_json(&Ring::product(vec![2, 2]).unwrap()),
            json!({"ring": "product", "factors": [{"ring": "zmod", "m": 2}, {"ring": "zmod", "m": 2}]})
        );
        for bad in ["zmod:1", "gf:6", "zp:4", "foo", "zmod:x", "product:gf:2", "q:3"] {
            assert!(ring_from_arg(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn parse_matrix_examples() {
        let q = Ring::rationals();
        assert!(parse_matrix("[[1,0],[0,1]]", &q).unwrap().is_identity());
        let m = parse_matrix(r#"[["1/2","3"],["0","2"]]"#, &q).unwrap();
        assert_eq!(m.get(0, 0), &q.parse_element("1/2").unwrap());
        let z2 = Ring::localized(2).unwrap();
        let m = parse_matrix(r#"[["3*2^-1","1"],[{"a":"1","v":-2},"0"]]"#, &z2).unwrap();
        assert_eq!(m.get(1, 0), &z2.parse_element("1/4").unwrap());
        let err = parse_matrix(r#"[["1","x"],["0","1"]]"#, &q).unwrap_err();
        assert!(err.to_string().contains("(1, 2)"), "{err}");
        assert!(parse_matrix("[[1,0],[0]]", &q).is_err());
        assert!(matches!(parse_matrix("[[1,0", &q), Err(Error::Parse(_))));
        let p = Ring::product(vec![2, 3]).unwrap();
        let m = parse_matrix(r#"[["(1,1)",[0,0]],["(0,0)","(1,1)"]]"#, &p).unwrap();
        assert!(m.is_identity());
    }

    #[test]
    fn factorisation_round_trip() {
        let r = Ring::zmod(5).unwrap();
        let g = Matrix::from_i64(&r, &[&[0, 1], &[4, 0]]).unwrap();
        let f = factor_sl2(&g).unwrap();
        let v = factorisation_to_json(&f);
        assert_eq!(v["pattern"], "U L U");
        assert_eq!(v["target"]["entries"], json!([["0", "1"], ["4", "0"]]));
        let back = factorisation_from_json(&v).unwrap();
        assert_eq!(back.blocks, f.blocks);
        assert!(back.verify().ok);

        let r6 = Ring::zmod(6).unwrap();
        for seed in 0..10 {
            let (g, _) = random_sl(&r6, 4, 10, seed);
            let f = factor_sl(&g).unwrap();
            let v = factorisation_to_json(&f);
            let text = serde_json::to_string(&v).unwrap();
            let back = factorisation_from_json(&serde_json::from_str(&text).unwrap()).unwrap();
            assert_eq!(back.blocks, f.blocks);
            assert_eq!(back.word, f.word);
            assert_eq!(factorisation_to_json(&back), v);
            assert!(back.verify().ok);
            let w = v["word"].as_array().unwrap();
            assert!(w.iter().all(|t| t["i"].as_u64().unwrap() >= 1 && t["j"].as_u64().unwrap() >= 1));
        }
    }

    #[test]
    fn trace_json() {
        let r = Ring::localized(2).unwrap();
        let g = parse_matrix(r#"[["1","3"],["1/2","5/2"]]"#, &r).unwrap();
        let (f, tr) = factor_sl2_zp(&g, DEFAULT_K_MAX).unwrap();
        let v = zp_trace_to_json(&tr);
        assert_eq!(v["case"], 1);
        assert_eq!(v["k"], "4");
        assert_eq!(v["q"], 13);
        assert_eq!(v["u"], 4);
        assert_eq!(v["l"], "1");
        assert_eq!(v["theta"], "-3/4");
        let back = factorisation_from_json(&factorisation_to_json(&f)).unwrap();
        assert_eq!(back.blocks, f.blocks);
        assert_eq!(factorisation_to_json(&f)["blocks"][1]["entries"][0][1], json!({"a": "1", "v": 4}));
    }

    #[test]
    fn monomial_json() {
        let z = Ring::integers();
        let m = MonomialMatrix { perm: vec![1, 0], units: vec![z.from_i64(1), z.from_i64(-1)] };
        let v = monomial_to_json(&m);
        assert_eq!(v, json!({"perm": [2, 1], "units": ["1", "-1"]}));
        assert_eq!(monomial_from_json(&v, &z).unwrap(), m);
    }
}
